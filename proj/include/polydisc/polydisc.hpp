#pragma once

#include "polydisc/errors.hpp"
#include "polydisc/format.hpp"
#include "polydisc/rng.hpp"
#include "polydisc/multi_index.hpp"
#include "polydisc/scheme.hpp"
#include "polydisc/bohr.hpp"
#include "polydisc/series.hpp"
#include "polydisc/extension.hpp"
#include "polydisc/radial.hpp"
#include "polydisc/special.hpp"
#include "polydisc/verify.hpp"
