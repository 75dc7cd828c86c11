#pragma once

#include "etgnn/dataset.hpp"

#include <array>
#include <cstdint>

namespace etgnn {

/// Parameters of the synthetic event stream.
///
/// Each event is one class. Its messages share a Gaussian feature centre, a
/// burst time, and event-private element pools per view; with probability
/// `cross_event_element_noise` a drawn element is swapped for one taken from
/// another event's pool.
struct SyntheticConfig {
    int num_events = 6;
    int messages_per_event = 100;
    int feature_dim = 32;
    double class_separation = 3.0;
    /// Pool size per event for hashtag, entity and user views.
    std::array<int, kNumViews> element_pool_per_event{30, 30, 30};
    /// Elements drawn (with replacement) per message and view.
    int elements_per_message = 1;
    double cross_event_element_noise = 0.1;
    double temporal_spread_days = 3.0;
    std::uint64_t seed = 1;

    void validate() const;
};

MultiViewDataset generate_synthetic(const SyntheticConfig& config);

}  // namespace etgnn
