#pragma once

#include "knet/clean.hpp"
#include "knet/disruption.hpp"
#include "knet/genmodel.hpp"
#include "knet/graph.hpp"
#include "knet/io.hpp"
#include "knet/metamath.hpp"
#include "knet/metrics.hpp"
#include "knet/nullmodel.hpp"
#include "knet/stats.hpp"
#include "knet/topo.hpp"
