#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "peergraph/cgraph.hpp"
#include "peergraph/spectral.hpp"

namespace peergraph::io {

// Shortest round-trip decimal form.
std::string format_double(double v);
std::string csv_field(std::string_view text);

// Reads a whole file; throws ParseError when it cannot be opened.
std::string read_text(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

// Native graph file: tab-separated sections [networks], [ixps], [edges]
// (asn, ixp_id, ps, class) preceded by date and beta lines. Reading rebuilds
// the graph with the stored beta.
std::string graph_to_text(const CGraph& g);
CGraph graph_from_text(std::string_view text);
CGraph read_graph(const std::filesystem::path& path);

// Dense matrix CSV: header row and first column carry node labels. The corner
// cell holds "date=YYYY-MM-DD" when the date is known.
std::string reduced_to_csv(const ReducedGoogleMatrix& R);
ReducedGoogleMatrix reduced_from_csv(std::string_view text);
std::string change_to_csv(const ChangeMatrix& C);

// node,type,value,rank
std::string rank_table_csv(const CGraph& g, const RankTable& table);

// GEXF 1.3 with both directed links of every edge.
std::string to_gexf(const CGraph& g);
// as_id, ixp_id, ps, class
std::string to_edgelist(const CGraph& g);
// One row per node with weighted degrees, capacity and (IXPs) balance.
std::string node_table_csv(const CGraph& g);

// Subset file: one label per line (AS123, IX45 or a bare AS number); '#'
// comments and blank lines ignored.
std::vector<NodeIndex> read_subset(const CGraph& g, std::string_view text);

}  // namespace peergraph::io
