#pragma once

#include "cftg/error.hpp"
#include "cftg/graph.hpp"
#include "cftg/metric.hpp"
#include "cftg/io.hpp"
#include "cftg/hitting.hpp"
#include "cftg/sourcewise_cft.hpp"
#include "cftg/sourcewise_eft.hpp"
#include "cftg/derived.hpp"
#include "cftg/single_pair.hpp"
#include "cftg/lowerbounds.hpp"
#include "cftg/oracle.hpp"
#include "cftg/verify.hpp"
