#include "etgnn/synthetic.hpp"

#include "etgnn/errors.hpp"
#include "etgnn/rng.hpp"

#include <cmath>
#include <string>

namespace etgnn {

void SyntheticConfig::validate() const {
    if (num_events <= 0 || messages_per_event <= 0 || feature_dim <= 0 || elements_per_message <= 0) {
        throw ValidationError("synthetic config: counts must be positive");
    }
    for (const int pool : element_pool_per_event) {
        if (pool <= 0) {
            throw ValidationError("synthetic config: element pools must be positive");
        }
    }
    if (!(cross_event_element_noise >= 0.0 && cross_event_element_noise <= 1.0)) {
        throw ValidationError("synthetic config: cross_event_element_noise must lie in [0, 1]");
    }
    if (!(class_separation >= 0.0) || !std::isfinite(class_separation)) {
        throw ValidationError("synthetic config: class_separation must be finite and nonnegative");
    }
    if (!(temporal_spread_days > 0.0) || !std::isfinite(temporal_spread_days)) {
        throw ValidationError("synthetic config: temporal_spread_days must be positive");
    }
}

namespace {

std::string element_name(ViewKind view, int event, int slot) {
    return std::string(1, view_name(view)[0]) + std::to_string(event) + "_" + std::to_string(slot);
}

}  // namespace

MultiViewDataset generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    SeededRng rng(config.seed);
    const int k_events = config.num_events;

    std::vector<Vector> centres;
    std::vector<double> burst;
    for (int k = 0; k < k_events; ++k) {
        Vector c(config.feature_dim);
        for (Index j = 0; j < c.size(); ++j) {
            c(j) = config.class_separation * rng.normal();
        }
        centres.push_back(std::move(c));
        burst.push_back(rng.uniform(0.0, config.temporal_spread_days * k_events));
    }

    // Offsets follow an exponential decay truncated to the spread window.
    const double rate = 3.0 / config.temporal_spread_days;
    const double tail = 1.0 - std::exp(-rate * config.temporal_spread_days);

    std::vector<Message> messages;
    messages.reserve(static_cast<std::size_t>(k_events * config.messages_per_event));
    for (int k = 0; k < k_events; ++k) {
        for (int m = 0; m < config.messages_per_event; ++m) {
            Message msg;
            msg.id = "m" + std::to_string(k * config.messages_per_event + m);
            msg.label = k;
            msg.time_days = burst[static_cast<std::size_t>(k)] - std::log(1.0 - rng.uniform() * tail) / rate;
            msg.features.resize(config.feature_dim);
            for (Index j = 0; j < msg.features.size(); ++j) {
                msg.features(j) = centres[static_cast<std::size_t>(k)](j) + rng.normal();
            }
            for (const ViewKind v : kAllViews) {
                const int pool = config.element_pool_per_event[static_cast<std::size_t>(v)];
                auto& bucket = v == ViewKind::Hashtag ? msg.hashtags
                               : v == ViewKind::Entity ? msg.entities
                                                       : msg.users;
                for (int e = 0; e < config.elements_per_message; ++e) {
                    int source = k;
                    if (k_events > 1 && rng.bernoulli(config.cross_event_element_noise)) {
                        source = static_cast<int>(rng.below(static_cast<std::uint64_t>(k_events - 1)));
                        if (source >= k) {
                            ++source;
                        }
                    }
                    bucket.insert(element_name(v, source, static_cast<int>(rng.below(static_cast<std::uint64_t>(pool)))));
                }
            }
            messages.push_back(std::move(msg));
        }
    }
    return make_dataset(std::move(messages));
}

}  // namespace etgnn
