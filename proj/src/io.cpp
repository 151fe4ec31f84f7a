#include "peergraph/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <sstream>

#include "peergraph/error.hpp"

namespace peergraph::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? end : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// Tabs and newlines cannot appear inside a graph-file field.
std::string clean(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("invalid number '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

std::uint32_t parse_id(std::string_view s, std::string_view what) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v == 0) {
    throw ParseError("invalid identifier '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

// Splits one CSV record honoring double quotes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string_view type_name(const CGraph& g, NodeIndex i) { return g.is_as(i) ? "AS" : "IXP"; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  // Whole numbers such as capacities stay in plain notation.
  const bool whole = std::abs(v) < 1e15 && v == std::trunc(v);
  auto [p, ec] = whole ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                       : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

std::string graph_to_text(const CGraph& g) {
  std::ostringstream out;
  out << "# peergraph c-graph v1\n";
  out << "date\t" << g.date().str() << '\n';
  out << "beta\t" << format_double(g.beta().beta_b) << '\t' << format_double(g.beta().beta_m) << '\t'
      << format_double(g.beta().beta_h) << '\n';
  out << "[networks]\nasn\tname\tinfo_ratio\tinfo_scope\tinfo_type\n";
  for (const auto& n : g.networks()) {
    out << n.asn << '\t' << clean(n.name) << '\t' << abbreviation(n.info_ratio) << '\t' << clean(n.info_scope)
        << '\t' << clean(n.info_type) << '\n';
  }
  out << "[ixps]\nixp_id\tname\tcountry\n";
  for (const auto& x : g.ixps()) out << x.ixp_id << '\t' << clean(x.name) << '\t' << x.country << '\n';
  out << "[edges]\nas_id\tixp_id\tps\tclass\n";
  for (const auto& e : g.edges()) {
    out << g.network(e.as_node).asn << '\t' << g.ixp(e.ixp_node).ixp_id << '\t' << format_double(e.ps) << '\t'
        << abbreviation(g.network(e.as_node).info_ratio) << '\n';
  }
  return out.str();
}

CGraph graph_from_text(std::string_view text) {
  RawSnapshot s;
  BetaParams beta;
  bool have_date = false, have_beta = false;
  enum class Section { Header, Networks, Ixps, Edges } section = Section::Header;
  bool expect_columns = false;
  std::size_t lineno = 0;
  for (auto line : lines_of(text)) {
    ++lineno;
    const std::string where = "graph file line " + std::to_string(lineno);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[networks]" || line == "[ixps]" || line == "[edges]") {
      section = line == "[networks]" ? Section::Networks : line == "[ixps]" ? Section::Ixps : Section::Edges;
      expect_columns = true;
      continue;
    }
    if (expect_columns) {
      expect_columns = false;
      continue;
    }
    auto f = split(line, '\t');
    switch (section) {
      case Section::Header:
        if (f[0] == "date" && f.size() == 2) {
          s.date = Date::parse(f[1]);
          have_date = true;
        } else if (f[0] == "beta" && f.size() == 4) {
          beta = {parse_double(f[1], where), parse_double(f[2], where), parse_double(f[3], where)};
          have_beta = true;
        } else {
          throw ParseError("unexpected " + where);
        }
        break;
      case Section::Networks: {
        if (f.size() != 5) throw ParseError("expected 5 fields on " + where);
        NetworkRecord n;
        n.asn = parse_id(f[0], where);
        n.name = std::string(f[1]);
        n.info_ratio = traffic_class_from_abbreviation(f[2]);
        n.info_scope = std::string(f[3]);
        n.info_type = std::string(f[4]);
        s.networks.push_back(std::move(n));
        break;
      }
      case Section::Ixps: {
        if (f.size() != 3) throw ParseError("expected 3 fields on " + where);
        s.ixps.push_back({parse_id(f[0], where), std::string(f[1]), std::string(f[2])});
        break;
      }
      case Section::Edges: {
        if (f.size() != 4) throw ParseError("expected 4 fields on " + where);
        s.memberships.push_back({parse_id(f[0], where), parse_id(f[1], where), parse_double(f[2], where)});
        break;
      }
    }
  }
  if (!have_date || !have_beta) throw ParseError("graph file lacks date or beta header");
  std::sort(s.networks.begin(), s.networks.end(), [](const auto& a, const auto& b) { return a.asn < b.asn; });
  std::sort(s.ixps.begin(), s.ixps.end(), [](const auto& a, const auto& b) { return a.ixp_id < b.ixp_id; });
  for (const auto& m : s.memberships) {
    if (!s.find_network(m.asn) || !s.find_ixp(m.ixp_id)) {
      throw ParseError("graph file edge AS" + std::to_string(m.asn) + " - IX" + std::to_string(m.ixp_id) +
                       " references an unknown node");
    }
  }
  return build_cgraph(s, beta);
}

CGraph read_graph(const std::filesystem::path& path) {
  try {
    return graph_from_text(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string reduced_to_csv(const ReducedGoogleMatrix& R) {
  std::ostringstream out;
  out << (R.date ? "date=" + R.date->str() : std::string{});
  for (const auto& l : R.labels) out << ',' << csv_field(l);
  out << '\n';
  for (std::size_t i = 0; i < R.gr.rows(); ++i) {
    out << csv_field(R.labels[i]);
    for (std::size_t j = 0; j < R.gr.cols(); ++j) out << ',' << format_double(R.gr(i, j));
    out << '\n';
  }
  return out.str();
}

ReducedGoogleMatrix reduced_from_csv(std::string_view text) {
  auto lines = lines_of(text);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("empty matrix file");
  auto header = split_csv(lines[0]);
  ReducedGoogleMatrix R;
  if (header[0].starts_with("date=")) R.date = Date::parse(std::string_view(header[0]).substr(5));
  R.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = R.labels.size();
  if (n == 0 || lines.size() != n + 1) throw ParseError("matrix file is not square");
  R.gr = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = split_csv(lines[i + 1]);
    if (row.size() != n + 1) throw ParseError("matrix row " + std::to_string(i + 1) + " has wrong width");
    if (row[0] != R.labels[i]) throw ParseError("row label '" + row[0] + "' does not match column order");
    for (std::size_t j = 0; j < n; ++j) R.gr(i, j) = parse_double(row[j + 1], "matrix file");
  }
  return R;
}

std::string change_to_csv(const ChangeMatrix& C) {
  std::ostringstream out;
  if (C.d1 && C.d2) out << "change=" << C.d1->str() << ":" << C.d2->str();
  for (const auto& l : C.labels) out << ',' << csv_field(l);
  out << '\n';
  for (std::size_t i = 0; i < C.delta.rows(); ++i) {
    out << csv_field(C.labels[i]);
    for (std::size_t j = 0; j < C.delta.cols(); ++j) {
      out << ',' << (C.is_defined(i, j) ? format_double(C.display(i, j)) : std::string("nan"));
    }
    out << '\n';
  }
  return out.str();
}

std::string rank_table_csv(const CGraph& g, const RankTable& table) {
  std::ostringstream out;
  out << "node,type,value,rank\n";
  for (const auto& e : table) {
    out << g.label(e.node) << ',' << type_name(g, e.node) << ',' << format_double(e.value) << ',' << e.rank << '\n';
  }
  return out.str();
}

std::string to_gexf(const CGraph& g) {
  const auto metrics = node_metrics(g);
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n"
      << "  <meta>\n    <creator>peergraph</creator>\n    <description>AS-IXP c-graph "
      << g.date().str() << "</description>\n  </meta>\n"
      << "  <graph defaultedgetype=\"directed\" mode=\"static\">\n"
      << "    <attributes class=\"node\">\n"
      << "      <attribute id=\"0\" title=\"type\" type=\"string\"/>\n"
      << "      <attribute id=\"1\" title=\"country\" type=\"string\"/>\n"
      << "      <attribute id=\"2\" title=\"port_capacity\" type=\"double\"/>\n"
      << "      <attribute id=\"3\" title=\"info_ratio\" type=\"string\"/>\n"
      << "    </attributes>\n"
      << "    <attributes class=\"edge\">\n"
      << "      <attribute id=\"0\" title=\"port_size\" type=\"double\"/>\n"
      << "    </attributes>\n"
      << "    <nodes>\n";
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    out << "      <node id=\"" << g.label(i) << "\" label=\"" << xml_escape(g.name(i)) << "\">\n"
        << "        <attvalues>\n"
        << "          <attvalue for=\"0\" value=\"" << type_name(g, i) << "\"/>\n"
        << "          <attvalue for=\"1\" value=\"" << (g.is_as(i) ? "" : g.ixp(i).country) << "\"/>\n"
        << "          <attvalue for=\"2\" value=\"" << format_double(metrics[i].port_capacity) << "\"/>\n"
        << "          <attvalue for=\"3\" value=\"" << (g.is_as(i) ? abbreviation(g.network(i).info_ratio) : "")
        << "\"/>\n"
        << "        </attvalues>\n      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t id = 0;
  for (const auto& e : g.edges()) {
    auto edge = [&](NodeIndex from, NodeIndex to, double w) {
      if (w <= 0.0) return;
      out << "      <edge id=\"" << id++ << "\" source=\"" << g.label(from) << "\" target=\"" << g.label(to)
          << "\" weight=\"" << format_double(w) << "\">\n"
          << "        <attvalues><attvalue for=\"0\" value=\"" << format_double(e.ps)
          << "\"/></attvalues>\n      </edge>\n";
    };
    edge(e.as_node, e.ixp_node, e.weight_to_ixp);
    edge(e.ixp_node, e.as_node, e.weight_to_as);
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
  return out.str();
}

std::string to_edgelist(const CGraph& g) {
  std::ostringstream out;
  out << "as_id,ixp_id,ps,class\n";
  for (const auto& e : g.edges()) {
    out << g.network(e.as_node).asn << ',' << g.ixp(e.ixp_node).ixp_id << ',' << format_double(e.ps) << ','
        << abbreviation(g.network(e.as_node).info_ratio) << '\n';
  }
  return out.str();
}

std::string node_table_csv(const CGraph& g) {
  const auto metrics = node_metrics(g);
  const auto balance = ixp_balance(g);
  std::ostringstream out;
  out << "node,type,name,country,info_ratio,info_type,degree,w_in,w_out,port_capacity,balance\n";
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    const auto& m = metrics[i];
    out << g.label(i) << ',' << type_name(g, i) << ',' << csv_field(g.name(i)) << ',';
    if (g.is_as(i)) {
      out << ',' << abbreviation(g.network(i).info_ratio) << ',' << csv_field(g.network(i).info_type);
    } else {
      out << g.ixp(i).country << ",,";
    }
    out << ',' << m.degree << ',' << format_double(m.w_in) << ',' << format_double(m.w_out) << ','
        << format_double(m.port_capacity) << ',';
    if (!g.is_as(i)) {
      const auto& b = balance.balance[i - g.num_ases()];
      if (b) out << format_double(*b);
    }
    out << '\n';
  }
  return out.str();
}

std::vector<NodeIndex> read_subset(const CGraph& g, std::string_view text) {
  std::vector<NodeIndex> subset;
  for (auto line : lines_of(text)) {
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty()) continue;
    auto comma = line.find_first_of(",\t ");
    auto token = line.substr(0, comma);
    auto node = g.find_label(token);
    if (!node) throw Error("subset node '" + std::string(token) + "' is not in the graph");
    subset.push_back(*node);
  }
  if (subset.empty()) throw Error("subset file lists no nodes");
  return subset;
}

}  // namespace peergraph::io
