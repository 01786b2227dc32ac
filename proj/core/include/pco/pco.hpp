#pragma once

#include "pco/analysis.hpp"
#include "pco/core.hpp"
#include "pco/engine.hpp"
#include "pco/error.hpp"
#include "pco/event_log.hpp"
#include "pco/rise_function.hpp"
#include "pco/shape.hpp"
