#pragma once

#include "kloos/arith.hpp"
#include "kloos/complex_sum.hpp"
#include "kloos/counting.hpp"
#include "kloos/expsum.hpp"
#include "kloos/parallel.hpp"
#include "kloos/report.hpp"
#include "kloos/tables.hpp"
#include "kloos/vaughan.hpp"
#include "kloos/verify.hpp"
