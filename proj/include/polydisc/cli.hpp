#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polydisc/bohr.hpp"
#include "polydisc/extension.hpp"
#include "polydisc/radial.hpp"
#include "polydisc/special.hpp"
#include "polydisc/verify.hpp"

namespace polydisc::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumeric = 3, kResource = 4 };

namespace detail {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string format;  // "", "csv" or "json"
  std::string out;
  std::size_t dim = 0;
  std::optional<std::size_t> samples;
};

/// Command output: plain text (also used for --format csv) and a JSON form.
struct Output {
  std::string text;
  Json json;
};

inline std::string read_all(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// --series text uses ';' between terms so it fits on one command line.
inline FourierSeries load_series(const std::string& path, const std::string& inline_text, std::istream& in) {
  if (!inline_text.empty()) {
    std::string t = inline_text;
    std::replace(t.begin(), t.end(), ';', '\n');
    return from_text(t);
  }
  if (path.empty()) throw ConfigError("need a series via --in <path|-> or --series");
  return from_text(read_all(path, in));
}

/// Dirichlet text: one "n -> re,im" per line.
inline DirichletSeries parse_dirichlet(const std::string& text) {
  DirichletSeries d;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::string_view v = trim(line);
    if (v.empty() || v.front() == '#') continue;
    auto arrow = v.find("->");
    if (arrow == std::string_view::npos) throw ConfigError("Dirichlet line needs 'n -> re,im'");
    double n = parse_double(v.substr(0, arrow));
    if (n < 1 || n != std::floor(n) || n > 1.8e19) throw ConfigError("Dirichlet index must be a positive integer");
    d.add(static_cast<std::uint64_t>(n), parse_complex(v.substr(arrow + 2)));
  }
  return d;
}

inline std::string dirichlet_text(const DirichletSeries& d) {
  std::string s;
  for (const auto& [n, c] : d.terms()) s += std::to_string(n) + " -> " + format_complex(c) + "\n";
  return s;
}

inline Json series_json(const FourierSeries& f) {
  Json terms = Json::array();
  for (const auto& [nu, c] : f.terms()) terms.push_back(Json{{"index", nu.to_string()}, {"re", c.real()}, {"im", c.imag()}});
  return Json{{"terms", terms}};
}

inline Output series_output(const FourierSeries& f) { return {to_text(f), series_json(f)}; }

inline Output scalar_output(double v) { return {format_double(v) + "\n", Json{{"value", v}}}; }

inline Output complex_output(Complex z) { return {format_complex(z) + "\n", Json{{"re", z.real()}, {"im", z.imag()}}}; }

inline std::vector<double> list_or_empty(const std::string& s) {
  return s.empty() ? std::vector<double>{} : parse_double_list(s);
}

inline std::uint64_t need_seed(const Globals& g, const char* what) {
  if (!g.seed) throw ConfigError(std::string(what) + " is stochastic and needs --seed");
  return *g.seed;
}

inline void emit(const Output& o, const Globals& g, std::ostream& out) {
  std::string body = g.format == "json" ? o.json.dump(2) + "\n" : o.text;
  if (g.out.empty()) {
    out << body;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw IoError("cannot write '" + g.out + "'");
  f << body;
  if (!f) throw IoError("write to '" + g.out + "' failed");
}

}  // namespace detail

/// Runs one command line (args excludes the program name). Data goes to
/// `out`, diagnostics to `err`; returns the exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in = std::cin) {
  using namespace detail;
  CLI::App app{"Boundary behavior on the infinite polydisc: operations and experiments", "polydisc"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "seed for stochastic commands");
  app.add_option("--workers", g.workers, "worker threads (never changes results)")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "output path (experiments: prefix for .csv and .json)");
  app.add_option("--dim", g.dim, "truncation dimension");
  app.add_option("--samples", g.samples, "Monte Carlo sample count");

  std::function<Output()> action;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* c = parent->add_subcommand(name, desc);
    c->fallthrough();
    return c;
  };
  auto group = [&](const std::string& name, const std::string& desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->require_subcommand(1);
    c->fallthrough();
    return c;
  };

  std::string in_path, series_text, scheme_text = "diagonal", theta_text, radii_text;

  // bohr
  CLI::App* bohr = group("bohr", "Bohr lift between Dirichlet and Fourier series");
  std::optional<std::uint64_t> n_opt;
  std::string coeff_text = "1";
  {
    CLI::App* c = leaf(bohr, "lift", "Dirichlet series -> Fourier series");
    c->add_option("--n", n_opt, "single index n");
    c->add_option("--coeff", coeff_text, "coefficient of n (re or re,im)");
    c->add_option("--in", in_path, "Dirichlet text 'n -> re,im' per line ('-' = stdin)");
    c->callback([&] {
      action = [&] {
        DirichletSeries d;
        if (n_opt) {
          if (*n_opt == 0) throw DomainError("n must be >= 1");
          d.add(*n_opt, parse_complex(coeff_text));
        } else if (!in_path.empty()) {
          d = parse_dirichlet(read_all(in_path, in));
        } else {
          throw ConfigError("bohr lift needs --n or --in");
        }
        return series_output(lift_dirichlet(d));
      };
    });
  }
  {
    CLI::App* c = leaf(bohr, "unlift", "Fourier series -> Dirichlet series");
    c->add_option("--in", in_path, "series file ('-' = stdin)");
    c->add_option("--series", series_text, "inline series, terms separated by ';'");
    c->callback([&] {
      action = [&] {
        DirichletSeries d = unlift(load_series(in_path, series_text, in));
        Json terms = Json::array();
        for (const auto& [n, c] : d.terms()) terms.push_back(Json{{"n", n}, {"re", c.real()}, {"im", c.imag()}});
        return Output{dirichlet_text(d), Json{{"terms", terms}}};
      };
    });
  }

  // series
  CLI::App* series = group("series", "Sparse Fourier series on the infinite torus");
  double p = 1.0;
  std::string norm_kind = "mc";
  std::uint32_t m_cut = 1;
  {
    CLI::App* c = leaf(series, "eval", "evaluate at a torus point (--theta) or polydisc point (--radii, --theta)");
    c->add_option("--in", in_path);
    c->add_option("--series", series_text);
    c->add_option("--theta", theta_text, "angles t1,t2,...")->required();
    c->add_option("--radii", radii_text, "radii r1,r2,... (default: torus)");
    c->callback([&] {
      action = [&] {
        FourierSeries f = load_series(in_path, series_text, in);
        auto th = parse_double_list(theta_text);
        if (radii_text.empty()) return complex_output(evaluate(f, TorusPoint(th)));
        return complex_output(evaluate(f, PolydiscPoint::polar(parse_double_list(radii_text), th)));
      };
    });
  }
  {
    CLI::App* c = leaf(series, "norm", "norms: mc (L^p by Monte Carlo), wiener, l2, max");
    c->add_option("--in", in_path);
    c->add_option("--series", series_text);
    c->add_option("--p", p, "exponent for --kind mc");
    c->add_option("--kind", norm_kind)->check(CLI::IsMember({"mc", "wiener", "l2", "max"}));
    c->callback([&] {
      action = [&] {
        FourierSeries f = load_series(in_path, series_text, in);
        if (norm_kind == "wiener") return scalar_output(wiener_norm(f));
        if (norm_kind == "l2") return scalar_output(l2_norm(f));
        if (norm_kind == "max") return scalar_output(max_coefficient(f));
        if (!(p > 0.0)) throw ConfigError("--p must be > 0");
        Estimate e = lp_norm_mc(f, p, g.samples.value_or(10000), StreamFamily(need_seed(g, "series norm")));
        return Output{format_double(e.value) + "," + format_double(e.std_error) + "\n",
                      Json{{"value", e.value}, {"std_error", e.std_error}, {"p", p}}};
      };
    });
  }
  {
    CLI::App* c = leaf(series, "abschnitt", "terms supported in the first m coordinates");
    c->add_option("--in", in_path);
    c->add_option("--series", series_text);
    c->add_option("--m", m_cut)->required();
    c->callback([&] { action = [&] { return series_output(abschnitt(load_series(in_path, series_text, in), m_cut)); }; });
  }

  // extend
  CLI::App* extend = group("extend", "Twisted radial extensions and product Poisson kernels");
  std::string xi_text;
  double r_val = 0.0, rk_val = 0.0;
  int grid_count = 40;
  {
    CLI::App* c = leaf(extend, "twist", "coefficientwise twist by xi");
    c->add_option("--in", in_path);
    c->add_option("--series", series_text);
    c->add_option("--xi", xi_text, "re or re,im")->required();
    c->add_option("--scheme", scheme_text, "diagonal | power:<a> | explicit:m1,m2,...");
    c->callback([&] {
      action = [&] {
        return series_output(twist(load_series(in_path, series_text, in), parse_complex(xi_text),
                                   RadialScheme::parse(scheme_text)));
      };
    });
  }
  {
    CLI::App* c = leaf(extend, "kernel", "product Poisson kernel at radius r");
    c->add_option("--r", r_val)->required();
    c->add_option("--theta", theta_text)->required();
    c->add_option("--scheme", scheme_text);
    c->callback([&] {
      action = [&] {
        return scalar_output(product_poisson_kernel(r_val, TorusPoint(parse_double_list(theta_text)),
                                                    RadialScheme::parse(scheme_text)));
      };
    });
  }
  {
    CLI::App* c = leaf(extend, "maximal", "grid radial maximal function at theta");
    c->add_option("--in", in_path);
    c->add_option("--series", series_text);
    c->add_option("--theta", theta_text)->required();
    c->add_option("--grid", grid_count, "dyadic grid depth");
    c->add_option("--scheme", scheme_text);
    c->callback([&] {
      action = [&] {
        FourierSeries f = load_series(in_path, series_text, in);
        TorusPoint th(parse_double_list(theta_text));
        if (f.dim() > th.size()) throw ConfigError("--theta is shorter than dim(F)");
        return scalar_output(radial_maximal(f, th, default_radius_grid(grid_count), RadialScheme::parse(scheme_text)));
      };
    });
  }

  // radial
  CLI::App* radial = group("radial", "Approach schemes, MZ sequences and block paths");
  std::uint64_t k_val = 1;
  double target_r = 0.999;
  std::string boundaries_text;
  {
    CLI::App* c = leaf(radial, "mz-seq", "r_k = 1 - k^(-1/3)");
    c->add_option("--k", k_val)->required();
    c->callback([&] {
      action = [&] {
        if (k_val == 0) throw DomainError("k must be >= 1");
        return scalar_output(mz_default_sequence(k_val).back());
      };
    });
  }
  {
    CLI::App* c = leaf(radial, "build-seq", "build a sequence obeying the step bound up to --target");
    c->add_option("--target", target_r);
    c->add_option("--scheme", scheme_text);
    c->callback([&] {
      action = [&] {
        RadialScheme s = RadialScheme::parse(scheme_text);
        MzSequence seq = build_mz_sequence(s, target_r);
        MzAudit a = audit_mz_sequence(seq, s);
        std::string text = "start,step,count,complete_fill\n";
        Json segs = Json::array();
        for (const auto& seg : seq.segments()) {
          text += format_double(seg.start) + "," + format_double(seg.step) + "," + std::to_string(seg.count) + "," +
                  (seg.complete_fill ? "1" : "0") + "\n";
          segs.push_back(Json{{"start", seg.start}, {"step", seg.step}, {"count", seg.count},
                              {"complete_fill", seg.complete_fill}});
        }
        Json j{{"first", seq.first()},
               {"last", seq.last()},
               {"size", seq.size()},
               {"audit",
                {{"pairs_ok", a.pairs_ok},
                 {"increasing", a.increasing},
                 {"gap_decay_ok", a.gap_decay_ok},
                 {"worst_ratio", a.worst_ratio},
                 {"worst_gap_ratio", a.worst_gap_ratio}}},
               {"segments", segs}};
        return Output{text, j};
      };
    });
  }
  {
    CLI::App* c = leaf(radial, "ratio", "kernel ratio P(r, theta) / P(r_k, theta)");
    c->add_option("--r", r_val)->required();
    c->add_option("--rk", rk_val)->required();
    c->add_option("--theta", theta_text)->required();
    c->add_option("--scheme", scheme_text);
    c->callback([&] {
      action = [&] {
        return scalar_output(kernel_ratio(r_val, rk_val, TorusPoint(parse_double_list(theta_text)),
                                          RadialScheme::parse(scheme_text)));
      };
    });
  }
  {
    CLI::App* c = leaf(radial, "block-path", "block path for block ends m1<m2<...; --samples draws tuples instead");
    c->add_option("--boundaries", boundaries_text, "m1,m2,...")->required();
    c->callback([&] {
      action = [&] {
        std::vector<std::uint32_t> b;
        for (double v : parse_double_list(boundaries_text)) {
          if (v < 1 || v != std::floor(v) || v > UINT32_MAX) throw ConfigError("block ends must be positive integers");
          b.push_back(static_cast<std::uint32_t>(v));
        }
        ApproachPath path;
        if (g.samples) {
          RandomStream rng = StreamFamily(need_seed(g, "sampled block path")).stream(0);
          path = sampled_block_path(b, *g.samples, rng);
        } else {
          path = block_path(b);
        }
        Json steps = Json::array();
        for (const auto& s : path.steps)
          steps.push_back(Json{{"head_len", s.head_len}, {"head_radius", s.head_radius}, {"block", s.block}});
        return Output{to_text(path), Json{{"steps", steps}, {"monotone", path.monotone}}};
      };
    });
  }

  // special
  CLI::App* special = group("special", "Example functions, the counterexample and the Riesz product");
  std::uint32_t n_factors = 200;
  std::uint32_t q = 3, depth = 12;
  std::optional<double> r_opt;
  double theta1 = 0.0;
  auto point = [&] {
    auto th = parse_double_list(theta_text);
    auto rr = radii_text.empty() ? std::vector<double>(th.size(), 1.0) : parse_double_list(radii_text);
    return PolydiscPoint::polar(rr, th);
  };
  {
    CLI::App* c = leaf(special, "f", "counterexample f on N factors");
    c->add_option("--theta", theta_text)->required();
    c->add_option("--radii", radii_text, "default: all 1");
    c->add_option("--factors", n_factors, "N");
    c->callback([&] {
      action = [&] {
        CounterexampleParams prm;
        prm.N = n_factors;
        return complex_output(counterexample_f(point(), prm));
      };
    });
  }
  {
    CLI::App* c = leaf(special, "g", "g(z) = sum z_n / n");
    c->add_option("--theta", theta_text)->required();
    c->add_option("--radii", radii_text);
    c->callback([&] { action = [&] { return complex_output(example_g(point())); }; });
  }
  {
    CLI::App* c = leaf(special, "u", "u(z) = prod (1 + i Re(z_n) / n)");
    c->add_option("--theta", theta_text)->required();
    c->add_option("--radii", radii_text);
    c->callback([&] { action = [&] { return complex_output(example_u(point())); }; });
  }
  {
    CLI::App* c = leaf(special, "riesz", "Riesz product: Poisson extension at --r, density without --r");
    c->add_option("--q", q);
    c->add_option("--depth", depth);
    c->add_option("--r", r_opt);
    c->add_option("--theta", theta1)->required();
    c->callback([&] {
      action = [&] {
        RieszProductMeasure mu(q, depth);
        return scalar_output(r_opt ? measure_radial_value(mu, *r_opt, theta1) : mu.density(theta1));
      };
    });
  }

  // experiment
  CLI::App* experiment = group("experiment", "Seeded Monte Carlo experiments");
  std::string config_path;
  {
    CLI::App* c = leaf(experiment, "run", "run a config document");
    c->add_option("config", config_path, "JSON config ('-' = stdin)")->required();
    c->callback([&] {
      action = [&]() -> Output {
        Json cfg;
        try {
          cfg = Json::parse(read_all(config_path, in));
        } catch (const nlohmann::json::parse_error& e) {
          throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (g.samples) cfg["samples"] = *g.samples;
        if (g.dim) cfg["dim"] = g.dim;
        ExperimentResult r = run_experiment(cfg, g.workers, g.seed);
        if (!g.out.empty()) {
          write_result_files(r, g.out);
          g.out.clear();
          return Output{};
        }
        std::ostringstream os;
        if (g.format == "csv") {
          write_csv(os, r);
        } else {
          write_json(os, r);
        }
        g.format.clear();
        return Output{os.str(), {}};
      };
    });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "polydisc: " << e.what() << "\n";
    return kConfig;
  }
  try {
    if (!action) throw ConfigError("no command given");
    emit(action(), g, out);
    return kOk;
  } catch (const ConfigError& e) {
    err << "polydisc: config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ResourceError& e) {
    err << "polydisc: resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const IoError& e) {
    err << "polydisc: I/O error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    // DomainError, RangeError, SpectrumError
    err << "polydisc: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace polydisc::cli
