#pragma once

#include "brbvs/copula.hpp"
#include "brbvs/data.hpp"
#include "brbvs/evaluation.hpp"
#include "brbvs/fit.hpp"
#include "brbvs/likelihood.hpp"
#include "brbvs/margin.hpp"
#include "brbvs/optimizer.hpp"
#include "brbvs/plot.hpp"
#include "brbvs/ranking.hpp"
#include "brbvs/report.hpp"
#include "brbvs/selection.hpp"
#include "brbvs/simulator.hpp"
#include "brbvs/stepwise.hpp"
