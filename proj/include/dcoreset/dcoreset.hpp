#pragma once

#include "dcoreset/baselines.hpp"
#include "dcoreset/coreset.hpp"
#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/harness.hpp"
#include "dcoreset/network.hpp"
#include "dcoreset/partition.hpp"
#include "dcoreset/rng.hpp"
#include "dcoreset/solvers.hpp"
#include "dcoreset/verify.hpp"
