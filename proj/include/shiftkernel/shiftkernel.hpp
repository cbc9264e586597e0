// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "shiftkernel/aggregate.hpp"
#include "shiftkernel/csv.hpp"
#include "shiftkernel/estimator.hpp"
#include "shiftkernel/experiment.hpp"
#include "shiftkernel/imaging.hpp"
#include "shiftkernel/io.hpp"
#include "shiftkernel/kernels.hpp"
#include "shiftkernel/metrics.hpp"
#include "shiftkernel/model.hpp"
#include "shiftkernel/spectral.hpp"
#include "shiftkernel/synthetic.hpp"
#include "shiftkernel/weights.hpp"
