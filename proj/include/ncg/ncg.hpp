#pragma once

#include "errors.hpp"
#include "jets.hpp"
#include "conformal.hpp"
#include "expr.hpp"
#include "groupoid.hpp"
#include "words.hpp"
#include "algebra.hpp"
#include "quadrature.hpp"
#include "cocycles.hpp"
#include "tensoralg.hpp"
#include "index.hpp"
#include "dist.hpp"
