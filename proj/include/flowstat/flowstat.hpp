#pragma once

#include "flowstat/baseline.hpp"
#include "flowstat/characterizer.hpp"
#include "flowstat/detector.hpp"
#include "flowstat/error.hpp"
#include "flowstat/evaluation.hpp"
#include "flowstat/flow_model.hpp"
#include "flowstat/io.hpp"
#include "flowstat/responder.hpp"
#include "flowstat/trafficgen.hpp"
