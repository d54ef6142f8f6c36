// Umbrella header.

#pragma once

#include "blockorder/counts.hpp"
#include "blockorder/exact.hpp"
#include "blockorder/experiment.hpp"
#include "blockorder/graph.hpp"
#include "blockorder/io.hpp"
#include "blockorder/labels.hpp"
#include "blockorder/params.hpp"
#include "blockorder/penalty.hpp"
#include "blockorder/rng.hpp"
#include "blockorder/sampler.hpp"
#include "blockorder/scenarios.hpp"
#include "blockorder/select.hpp"
#include "blockorder/special.hpp"
#include "blockorder/spectral.hpp"
#include "blockorder/vbem.hpp"
