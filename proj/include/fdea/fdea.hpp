#pragma once

#include "fdea/analysis.hpp"
#include "fdea/config.hpp"
#include "fdea/dataset.hpp"
#include "fdea/error.hpp"
#include "fdea/fuzzy.hpp"
#include "fdea/io.hpp"
#include "fdea/model.hpp"
#include "fdea/report.hpp"
#include "fdea/simplex.hpp"
#include "fdea/solver.hpp"
