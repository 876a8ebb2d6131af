#pragma once

#include "fxsig/common.hpp"
#include "fxsig/csv.hpp"
#include "fxsig/ingest.hpp"
#include "fxsig/preprocess.hpp"
#include "fxsig/lexicon.hpp"
#include "fxsig/nbayes.hpp"
#include "fxsig/indicators.hpp"
#include "fxsig/signals.hpp"
#include "fxsig/backtest.hpp"
#include "fxsig/metrics.hpp"
#include "fxsig/pipeline.hpp"
