#pragma once

#include "weekcast/baselines/labeled.hpp"

#include <span>

namespace weekcast::baselines {

/// Euclidean k-nearest neighbours. Distance ties go to the lower training
/// index; classification votes break ties toward class 0; regression averages
/// the neighbour targets. Throws std::invalid_argument for an empty training
/// set or k outside [1, size].
double knn_predict(const LabeledDataset& train, std::span<const double> query, std::size_t k = 5);

} // namespace weekcast::baselines
