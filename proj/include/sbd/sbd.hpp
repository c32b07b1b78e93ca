#pragma once

#include "sbd/geometry.hpp"
#include "sbd/codec.hpp"
#include "sbd/scoring.hpp"
#include "sbd/suppression.hpp"
#include "sbd/evaluation.hpp"
#include "sbd/simulator.hpp"
#include "sbd/icdar_io.hpp"
#include "sbd/config.hpp"
