#pragma once

#include "bigfloat.hpp"
#include "density.hpp"
#include "dyson.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "meijer.hpp"
#include "parallel.hpp"
#include "permanent.hpp"
#include "polynomial.hpp"
#include "product.hpp"
#include "random.hpp"
#include "specfun.hpp"
#include "stats.hpp"
#include "theory.hpp"
