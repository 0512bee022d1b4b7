#pragma once

#include "samp/model.hpp"
#include "samp/io.hpp"
#include "samp/semantics.hpp"
#include "samp/scheduler.hpp"
#include "samp/motion.hpp"
#include "samp/refine.hpp"
#include "samp/engine.hpp"
#include "samp/benchmarks.hpp"
#include "samp/render.hpp"
