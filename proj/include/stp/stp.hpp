#pragma once

// Umbrella header for the whole tracker library.

#include "stp/channels.hpp"
#include "stp/engine.hpp"
#include "stp/errors.hpp"
#include "stp/eval.hpp"
#include "stp/io.hpp"
#include "stp/params_io.hpp"
#include "stp/parts.hpp"
#include "stp/raster.hpp"
#include "stp/ridge.hpp"
#include "stp/sampling.hpp"
#include "stp/sequence.hpp"
#include "stp/synth.hpp"
#include "stp/voting.hpp"
