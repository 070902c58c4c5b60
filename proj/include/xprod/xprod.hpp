#pragma once

#include "xprod/core.hpp"
#include "xprod/algebra.hpp"
#include "xprod/endo.hpp"
#include "xprod/matcalc.hpp"
#include "xprod/norms.hpp"
#include "xprod/rep.hpp"
#include "xprod/io.hpp"
