#pragma once

#include "flameseg/analysis.hpp"
#include "flameseg/augment.hpp"
#include "flameseg/benchmark.hpp"
#include "flameseg/chan_vese.hpp"
#include "flameseg/class_weights.hpp"
#include "flameseg/contingency.hpp"
#include "flameseg/core.hpp"
#include "flameseg/csv_io.hpp"
#include "flameseg/dataset.hpp"
#include "flameseg/distance_transform.hpp"
#include "flameseg/gmm.hpp"
#include "flameseg/kmeans.hpp"
#include "flameseg/losses.hpp"
#include "flameseg/metrics.hpp"
#include "flameseg/otsu.hpp"
#include "flameseg/png_io.hpp"
#include "flameseg/report.hpp"
#include "flameseg/segment.hpp"
#include "flameseg/synthetic.hpp"
