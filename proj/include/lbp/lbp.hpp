#pragma once

// Everything needed to load matches, detect line-breaking passes, build
// chains and write reports.

#include "lbp/aggregation.hpp"
#include "lbp/chains.hpp"
#include "lbp/config.hpp"
#include "lbp/detection.hpp"
#include "lbp/error.hpp"
#include "lbp/geometry.hpp"
#include "lbp/ingestion.hpp"
#include "lbp/match.hpp"
#include "lbp/metrics.hpp"
#include "lbp/pipeline.hpp"
#include "lbp/report.hpp"
#include "lbp/team_shape.hpp"
#include "lbp/validate.hpp"
