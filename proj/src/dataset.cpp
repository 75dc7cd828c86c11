#include "etgnn/dataset.hpp"

#include "etgnn/errors.hpp"
#include "etgnn/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_set>
#include <utility>

namespace etgnn {

std::string_view view_name(ViewKind view) {
    switch (view) {
        case ViewKind::Hashtag:
            return "hashtag";
        case ViewKind::Entity:
            return "entity";
        case ViewKind::User:
            return "user";
    }
    return "unknown";
}

ViewKind parse_view(std::string_view name) {
    for (const ViewKind v : kAllViews) {
        if (view_name(v) == name) {
            return v;
        }
    }
    throw ValidationError("unknown view '" + std::string(name) + "' (expected hashtag, entity or user)");
}

const std::set<std::string>& Message::elements(ViewKind view) const {
    switch (view) {
        case ViewKind::Hashtag:
            return hashtags;
        case ViewKind::Entity:
            return entities;
        case ViewKind::User:
            return users;
    }
    return hashtags;
}

Matrix MultiViewDataset::feature_matrix() const {
    Matrix x(size(), feature_dim);
    for (Index i = 0; i < size(); ++i) {
        x.row(i) = messages[static_cast<std::size_t>(i)].features.transpose();
    }
    return x;
}

std::vector<int> MultiViewDataset::labels() const {
    std::vector<int> out;
    out.reserve(messages.size());
    for (const auto& m : messages) {
        out.push_back(m.label.value_or(-1));
    }
    return out;
}

ViewGraph build_view_graph(const std::vector<Message>& messages, ViewKind view,
                           const GraphBuildOptions& options) {
    const auto n = static_cast<Index>(messages.size());

    // element -> messages containing it, ordered by element key
    std::map<std::string, std::vector<Index>> inverted;
    for (Index i = 0; i < n; ++i) {
        for (const auto& element : messages[static_cast<std::size_t>(i)].elements(view)) {
            inverted[element].push_back(i);
        }
    }

    std::vector<std::pair<Index, Index>> pairs;
    for (const auto& [element, members] : inverted) {
        if (members.size() > options.clique_warning_threshold) {
            std::clog << "warning: " << view_name(view) << " element '" << element << "' links "
                      << members.size() << " messages\n";
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                pairs.emplace_back(members[a], members[b]);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    ViewGraph graph;
    graph.view = view;
    graph.node_count = n;
    std::vector<Index> degree(static_cast<std::size_t>(n), 0);
    for (const auto& [i, j] : pairs) {
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(j)];
    }
    graph.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    for (Index i = 0; i < n; ++i) {
        graph.offsets[static_cast<std::size_t>(i) + 1] = graph.offsets[static_cast<std::size_t>(i)] +
                                                         degree[static_cast<std::size_t>(i)];
    }
    graph.neighbors.resize(pairs.size() * 2);
    graph.edge_dt.resize(pairs.size() * 2);
    // Pairs are sorted, so filling row i with j > i and row j with i < j in this
    // order leaves every neighbour list ascending.
    std::vector<std::vector<Index>> lower(static_cast<std::size_t>(n));
    for (const auto& [i, j] : pairs) {
        lower[static_cast<std::size_t>(j)].push_back(i);
    }
    std::vector<std::vector<Index>> upper(static_cast<std::size_t>(n));
    for (const auto& [i, j] : pairs) {
        upper[static_cast<std::size_t>(i)].push_back(j);
    }
    for (Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        auto pos = static_cast<std::size_t>(graph.offsets[si]);
        for (const Index j : lower[si]) {
            graph.neighbors[pos++] = j;
        }
        for (const Index j : upper[si]) {
            graph.neighbors[pos++] = j;
        }
        const double ti = messages[si].time_days;
        for (auto k = static_cast<std::size_t>(graph.offsets[si]); k < pos; ++k) {
            graph.edge_dt[k] = std::abs(ti - messages[static_cast<std::size_t>(graph.neighbors[k])].time_days);
        }
    }
    return graph;
}

namespace {

std::string at_line(std::size_t line) {
    return line == 0 ? std::string() : " (line " + std::to_string(line) + ")";
}

void validate_message(const Message& m, Index feature_dim, std::unordered_set<std::string>& ids,
                      std::size_t line) {
    if (!ids.insert(m.id).second) {
        throw SchemaError("duplicate message id '" + m.id + "'" + at_line(line));
    }
    if (!std::isfinite(m.time_days)) {
        throw SchemaError("message '" + m.id + "' has a non-finite timestamp" + at_line(line));
    }
    if (m.features.size() != feature_dim) {
        throw SchemaError("message '" + m.id + "' has " + std::to_string(m.features.size()) +
                          " features, expected " + std::to_string(feature_dim) + at_line(line));
    }
    if (!m.features.allFinite()) {
        throw SchemaError("message '" + m.id + "' has non-finite features" + at_line(line));
    }
    if (m.label && *m.label < 0) {
        throw SchemaError("message '" + m.id + "' has negative label" + at_line(line));
    }
}

MultiViewDataset assemble(std::vector<Message> messages, const GraphBuildOptions& options) {
    MultiViewDataset ds;
    ds.feature_dim = messages.empty() ? 0 : messages.front().features.size();
    int max_label = -1;
    for (const auto& m : messages) {
        if (m.label) {
            max_label = std::max(max_label, *m.label);
        }
    }
    ds.num_classes = max_label + 1;
    for (const ViewKind v : kAllViews) {
        ds.graphs[static_cast<std::size_t>(v)] = build_view_graph(messages, v, options);
    }
    ds.messages = std::move(messages);
    return ds;
}

std::set<std::string> string_set(const nlohmann::json& value, const char* field, std::size_t line) {
    if (!value.is_array()) {
        throw ParseError(std::string("field '") + field + "' must be an array of strings" + at_line(line));
    }
    std::set<std::string> out;
    for (const auto& v : value) {
        if (!v.is_string()) {
            throw ParseError(std::string("field '") + field + "' must be an array of strings" + at_line(line));
        }
        out.insert(v.get<std::string>());
    }
    return out;
}

Message parse_record(const std::string& text, std::size_t line) {
    nlohmann::json record;
    try {
        record = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed record" + at_line(line) + ": " + e.what());
    }
    if (!record.is_object()) {
        throw ParseError("record is not an object" + at_line(line));
    }
    static const std::array<std::string_view, 7> kFields{"id", "t", "hashtags", "entities", "users", "label", "x"};
    for (const auto& [key, value] : record.items()) {
        if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
            throw SchemaError("unknown field '" + key + "'" + at_line(line));
        }
    }
    for (const auto field : kFields) {
        if (!record.contains(field)) {
            throw SchemaError("missing field '" + std::string(field) + "'" + at_line(line));
        }
    }

    Message m;
    if (!record["id"].is_string()) {
        throw ParseError("field 'id' must be a string" + at_line(line));
    }
    m.id = record["id"].get<std::string>();
    if (!record["t"].is_number()) {
        throw ParseError("field 't' must be a number" + at_line(line));
    }
    m.time_days = record["t"].get<double>();
    m.hashtags = string_set(record["hashtags"], "hashtags", line);
    m.entities = string_set(record["entities"], "entities", line);
    m.users = string_set(record["users"], "users", line);
    const auto& label = record["label"];
    if (label.is_null()) {
        m.label = std::nullopt;
    } else if (label.is_number_integer()) {
        m.label = label.get<int>();
    } else {
        throw ParseError("field 'label' must be an integer or null" + at_line(line));
    }
    const auto& x = record["x"];
    if (!x.is_array()) {
        throw ParseError("field 'x' must be an array of numbers" + at_line(line));
    }
    m.features.resize(static_cast<Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!x[k].is_number()) {
            throw ParseError("field 'x' must be an array of numbers" + at_line(line));
        }
        m.features(static_cast<Index>(k)) = x[k].get<double>();
    }
    return m;
}

}  // namespace

MultiViewDataset make_dataset(std::vector<Message> messages, const GraphBuildOptions& options) {
    std::unordered_set<std::string> ids;
    const Index dim = messages.empty() ? 0 : messages.front().features.size();
    for (const auto& m : messages) {
        validate_message(m, dim, ids, 0);
    }
    return assemble(std::move(messages), options);
}

MultiViewDataset parse_jsonl(std::istream& in) {
    std::vector<Message> messages;
    std::unordered_set<std::string> ids;
    Index dim = -1;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        Message m = parse_record(text, line);
        if (dim < 0) {
            dim = m.features.size();
        }
        validate_message(m, dim, ids, line);
        messages.push_back(std::move(m));
    }
    return assemble(std::move(messages), {});
}

MultiViewDataset ingest_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open dataset '" + path.string() + "'");
    }
    return parse_jsonl(in);
}

void write_jsonl(const std::vector<Message>& messages, std::ostream& out) {
    for (const auto& m : messages) {
        nlohmann::ordered_json record;
        record["id"] = m.id;
        record["t"] = m.time_days;
        record["hashtags"] = m.hashtags;
        record["entities"] = m.entities;
        record["users"] = m.users;
        record["label"] = m.label ? nlohmann::ordered_json(*m.label) : nlohmann::ordered_json(nullptr);
        record["x"] = std::vector<double>(m.features.begin(), m.features.end());
        out << record.dump() << '\n';
    }
}

void write_jsonl(const std::vector<Message>& messages, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write dataset '" + path.string() + "'");
    }
    write_jsonl(messages, out);
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void export_edge_list(const MultiViewDataset& dataset, std::ostream& out) {
    char buffer[64];
    for (const ViewKind v : kAllViews) {
        const ViewGraph& g = dataset.graph(v);
        for (Index i = 0; i < g.node_count; ++i) {
            for (Index k = g.offsets[static_cast<std::size_t>(i)]; k < g.offsets[static_cast<std::size_t>(i) + 1]; ++k) {
                const Index j = g.neighbors[static_cast<std::size_t>(k)];
                if (j <= i) {
                    continue;
                }
                std::snprintf(buffer, sizeof buffer, "%.17g", g.edge_dt[static_cast<std::size_t>(k)]);
                out << view_name(v) << '\t' << dataset.messages[static_cast<std::size_t>(i)].id << '\t'
                    << dataset.messages[static_cast<std::size_t>(j)].id << '\t' << buffer << '\n';
            }
        }
    }
}

SplitMasks split_dataset(const MultiViewDataset& dataset, std::array<double, 3> ratios, std::uint64_t seed) {
    for (const double r : ratios) {
        if (!(r > 0.0)) {
            throw ValidationError("split ratios must be positive");
        }
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
        throw ValidationError("split ratios must sum to 1, got " +
                              std::to_string(ratios[0] + ratios[1] + ratios[2]));
    }

    std::map<int, std::vector<Index>> by_class;
    for (Index i = 0; i < dataset.size(); ++i) {
        const auto& label = dataset.messages[static_cast<std::size_t>(i)].label;
        if (label) {
            by_class[*label].push_back(i);
        }
    }

    SeededRng rng(seed);
    SplitMasks masks;
    for (auto& [label, members] : by_class) {
        rng.shuffle(members);
        const auto n = static_cast<Index>(members.size());
        if (n < 3) {
            masks.train.insert(masks.train.end(), members.begin(), members.end());
            continue;
        }
        const Index n_val = std::max<Index>(1, static_cast<Index>(std::llround(ratios[1] * static_cast<double>(n))));
        const Index n_test = std::max<Index>(1, static_cast<Index>(std::llround(ratios[2] * static_cast<double>(n))));
        const Index n_train = std::max<Index>(1, n - n_val - n_test);
        auto it = members.begin();
        masks.train.insert(masks.train.end(), it, it + n_train);
        masks.val.insert(masks.val.end(), it + n_train, it + n_train + n_val);
        masks.test.insert(masks.test.end(), it + n_train + n_val, it + std::min(n, n_train + n_val + n_test));
    }
    std::sort(masks.train.begin(), masks.train.end());
    std::sort(masks.val.begin(), masks.val.end());
    std::sort(masks.test.begin(), masks.test.end());
    return masks;
}

}  // namespace etgnn
