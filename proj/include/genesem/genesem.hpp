#pragma once

#include "genesem/cluster/cluster.hpp"
#include "genesem/encode.hpp"
#include "genesem/error.hpp"
#include "genesem/ingest.hpp"
#include "genesem/matrix.hpp"
#include "genesem/metrics.hpp"
#include "genesem/pipeline.hpp"
#include "genesem/reduce/two_stage.hpp"
#include "genesem/report.hpp"
#include "genesem/sweep.hpp"
#include "genesem/synthetic.hpp"
#include "genesem/version.hpp"
