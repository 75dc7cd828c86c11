#pragma once

#include "etgnn/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace etgnn {

/// The three relation types a message graph can be built from.
enum class ViewKind { Hashtag = 0, Entity = 1, User = 2 };

inline constexpr std::size_t kNumViews = 3;
inline constexpr std::array<ViewKind, kNumViews> kAllViews{ViewKind::Hashtag, ViewKind::Entity,
                                                           ViewKind::User};

std::string_view view_name(ViewKind view);
/// Accepts "hashtag", "entity", "user".
ViewKind parse_view(std::string_view name);

struct Message {
    std::string id;
    double time_days = 0.0;
    std::set<std::string> hashtags;
    std::set<std::string> entities;
    std::set<std::string> users;
    Vector features;
    std::optional<int> label;

    const std::set<std::string>& elements(ViewKind view) const;
};

/// Undirected co-occurrence graph over messages in compressed sparse row form.
///
/// Edges are stored symmetrically, without self-edges, with neighbour lists
/// sorted ascending. `edge_dt[k]` is |t_i - t_j| in days for stored edge k.
struct ViewGraph {
    ViewKind view = ViewKind::Hashtag;
    Index node_count = 0;
    std::vector<Index> offsets{0};
    std::vector<Index> neighbors;
    std::vector<double> edge_dt;

    Index degree(Index node) const { return offsets[node + 1] - offsets[node]; }
    /// Number of undirected edges (half the stored entries).
    Index edge_count() const { return static_cast<Index>(neighbors.size()) / 2; }
};

struct SplitMasks {
    std::vector<Index> train;
    std::vector<Index> val;
    std::vector<Index> test;
};

struct MultiViewDataset {
    std::vector<Message> messages;
    std::array<ViewGraph, kNumViews> graphs;
    int num_classes = 0;
    Index feature_dim = 0;
    std::optional<SplitMasks> split;

    Index size() const { return static_cast<Index>(messages.size()); }
    const ViewGraph& graph(ViewKind view) const { return graphs[static_cast<std::size_t>(view)]; }
    /// n x d_in feature matrix.
    Matrix feature_matrix() const;
    /// Label of each row, -1 where unlabeled.
    std::vector<int> labels() const;
};

struct GraphBuildOptions {
    /// Log a warning when a single element links more than this many messages.
    std::size_t clique_warning_threshold = 500;
};

/// Connects every pair of messages sharing at least one element of `view`
/// (inverted index, then clique expansion per element, deduplicated).
ViewGraph build_view_graph(const std::vector<Message>& messages, ViewKind view,
                           const GraphBuildOptions& options = {});

/// Validates the messages, builds all three graphs and infers K = max label + 1.
MultiViewDataset make_dataset(std::vector<Message> messages, const GraphBuildOptions& options = {});

/// Reads a line-delimited dataset (one JSON object per line).
MultiViewDataset ingest_jsonl(const std::filesystem::path& path);
MultiViewDataset parse_jsonl(std::istream& in);

void write_jsonl(const std::vector<Message>& messages, std::ostream& out);
void write_jsonl(const std::vector<Message>& messages, const std::filesystem::path& path);

/// Debug export: `view<TAB>id_i<TAB>id_j<TAB>dt`, one line per undirected edge (i < j).
void export_edge_list(const MultiViewDataset& dataset, std::ostream& out);

/// Stratified train/val/test split of the labelled messages.
///
/// Classes with at least three members get at least one sample in every
/// split; smaller classes go entirely to train.
SplitMasks split_dataset(const MultiViewDataset& dataset, std::array<double, 3> ratios, std::uint64_t seed);

}  // namespace etgnn
