#include "peergraph/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <set>
#include <sstream>

#include "peergraph/analysis.hpp"
#include "peergraph/clustering.hpp"
#include "peergraph/error.hpp"
#include "peergraph/fitting.hpp"
#include "peergraph/io.hpp"
#include "peergraph/manifest.hpp"
#include "peergraph/parallel.hpp"

namespace peergraph::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Relative output paths land under $PEERGRAPH_OUTPUT_DIR when it is set.
fs::path output_path(const std::string& given) {
  fs::path p(given);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("PEERGRAPH_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  return p;
}

// Collects inputs and outputs of one command and writes the manifests.
class Run {
 public:
  explicit Run(std::vector<std::string> command_line) { manifest_.command_line = std::move(command_line); }

  void input(const fs::path& p) { manifest_.add_input(p); }
  ordered_json& params() { return manifest_.parameters; }

  fs::path write(const std::string& given, const std::string& content) {
    auto p = output_path(given);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    io::write_atomically(p, content);
    written_.push_back(p);
    return p;
  }

  // Every output gets a sibling manifest listing all outputs of the run.
  void finish() {
    for (const auto& p : written_) manifest_.add_output(p);
    const auto text = manifest_.to_json();
    for (const auto& p : written_) {
      auto m = p;
      m += ".manifest.json";
      io::write_atomically(m, text);
    }
  }

 private:
  RunManifest manifest_;
  std::vector<fs::path> written_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "low:high:count" -> evenly spaced values, or a single number.
std::vector<double> parse_grid(const std::string& text) {
  auto parts = std::vector<std::string>{};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  try {
    if (parts.size() == 1) return {std::stod(parts[0])};
    if (parts.size() == 3) return linspace(std::stod(parts[0]), std::stod(parts[1]), std::stoul(parts[2]));
  } catch (const std::exception&) {
  }
  throw Error("invalid grid '" + text + "', expected low:high:count");
}

std::set<Asn> read_asn_set(const fs::path& path) {
  std::set<Asn> out;
  std::istringstream in(io::read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    if (token.starts_with("AS") || token.starts_with("as")) token = token.substr(2);
    try {
      std::size_t used = 0;
      const auto v = std::stoul(token, &used);
      if (used != token.size() || v == 0) throw std::invalid_argument(token);
      out.insert(static_cast<Asn>(v));
    } catch (const std::exception&) {
      throw Error("invalid AS number '" + token + "' in " + path.string());
    }
  }
  return out;
}

ordered_json beta_json(const BetaParams& b) {
  return {{"beta_b", b.beta_b}, {"beta_m", b.beta_m}, {"beta_h", b.beta_h}};
}

struct GraphInput {
  std::string path;
  CGraph load(Run& run) const {
    run.input(path);
    auto g = io::read_graph(path);
    run.params()["beta"] = beta_json(g.beta());
    return g;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted AS-IXP peering graph analysis"};
  app.name(args.empty() ? "peergraph" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.set_version_flag("--version", std::string(kVersion));

  const std::vector<std::string> command_line(args.begin(), args.end());
  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse a PeeringDB dump and report record counts");
  std::string snapshot_path, date_text, out_path;
  bool validate = false;
  Asn reference_asn = 0;
  double reference_capacity = 0.0, outlier_factor = kDefaultOutlierFactor;
  ingest->add_option("--snapshot", snapshot_path, "PeeringDB dump (JSON)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--date", date_text, "Snapshot date YYYY-MM-DD")->required();
  ingest->add_flag("--validate", validate, "Screen ASes with implausible port capacity");
  ingest->add_option("--reference-asn", reference_asn, "AS whose capacity is the outlier baseline");
  ingest->add_option("--reference-capacity", reference_capacity, "Explicit baseline capacity (Mbit/s)");
  ingest->add_option("--outlier-factor", outlier_factor, "Flag ASes above factor x baseline");
  ingest->add_option("--out", out_path, "Write the outlier report here");
  ingest->callback([&] {
    action = [&] {
      Run r(command_line);
      r.input(snapshot_path);
      const auto s = parse_snapshot(snapshot_path, Date::parse(date_text));
      out << "date\t" << s.date.str() << "\nnetworks\t" << s.networks.size() << "\nixps\t" << s.ixps.size()
          << "\nmemberships\t" << s.memberships.size() << "\nmalformed_networks\t" << s.stats.malformed_networks
          << "\nduplicate_networks\t" << s.stats.duplicate_networks << "\nmalformed_ixps\t"
          << s.stats.malformed_ixps << "\nduplicate_ixps\t" << s.stats.duplicate_ixps
          << "\ndropped_memberships\t" << s.stats.dropped_memberships() << "\nunresolved_memberships\t"
          << s.stats.unresolved_memberships << '\n';
      if (!validate) return;
      double reference = reference_capacity;
      if (reference_asn != 0) {
        const auto caps = as_capacities(s);
        auto it = caps.find(reference_asn);
        if (it == caps.end() || !(it->second > 0.0)) {
          throw Error("reference AS" + std::to_string(reference_asn) + " has no port capacity in this snapshot");
        }
        reference = it->second;
      }
      if (!(reference > 0.0)) throw Error("--validate needs --reference-asn or --reference-capacity");
      const auto reports = validate_snapshot(s, reference, outlier_factor);
      std::ostringstream table;
      table << "asn,capacity_mbps,ratio,ixp_id,port_size\n";
      for (const auto& rep : reports) {
        for (const auto& m : rep.memberships) {
          table << rep.asn << ',' << io::format_double(rep.capacity) << ',' << io::format_double(rep.ratio) << ','
                << m.ixp_id << ',' << io::format_double(m.port_size) << '\n';
        }
      }
      out << "reference_capacity\t" << io::format_double(reference) << "\noutliers\t" << reports.size() << '\n';
      if (!out_path.empty()) {
        r.params()["reference_capacity"] = reference;
        r.params()["outlier_factor"] = outlier_factor;
        r.write(out_path, table.str());
        r.finish();
      } else {
        out << table.str();
      }
    };
  });

  // build
  auto* build = app.add_subcommand("build", "Build the weighted AS-IXP graph from a dump");
  BetaParams beta;
  std::size_t min_members = 0;
  build->add_option("--snapshot", snapshot_path, "PeeringDB dump (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--date", date_text, "Snapshot date YYYY-MM-DD")->required();
  build->add_option("--beta-h", beta.beta_h, "Heavy in/outbound coefficient");
  build->add_option("--beta-m", beta.beta_m, "Mostly in/outbound coefficient");
  build->add_option("--beta-b", beta.beta_b, "Balanced / Not Disclosed coefficient");
  build->add_option("--min-members", min_members, "Drop IXPs with fewer AS members");
  build->add_option("--out", out_path, "Graph file")->required();
  build->callback([&] {
    action = [&] {
      Run r(command_line);
      r.input(snapshot_path);
      const auto s = parse_snapshot(snapshot_path, Date::parse(date_text));
      const auto g = build_cgraph(s, beta, {min_members});
      r.params()["beta"] = beta_json(beta);
      r.params()["min_members"] = min_members;
      r.write(out_path, io::graph_to_text(g));
      r.finish();
      const auto bal = ixp_balance(g);
      out << "nodes\t" << g.num_nodes() << "\nases\t" << g.num_ases() << "\nixps\t" << g.num_ixps() << "\nlinks\t"
          << g.num_edges() << "\nlargest_component_fraction\t" << io::format_double(largest_component_fraction(g))
          << "\nbalance_mean\t" << io::format_double(bal.summary.mean) << "\nbalance_std\t"
          << io::format_double(bal.summary.stddev) << "\nbalance_quartiles\t" << io::format_double(bal.summary.q1)
          << ',' << io::format_double(bal.summary.median) << ',' << io::format_double(bal.summary.q3)
          << "\nbalance_undefined\t" << bal.undefined << '\n';
      for (auto side : {NodeKind::As, NodeKind::Ixp}) {
        const char* name = side == NodeKind::As ? "as" : "ixp";
        try {
          const auto fit = powerlaw_fit(degrees(g, side));
          out << name << "_degree_gamma\t" << io::format_double(fit.gamma) << "\n" << name << "_degree_xmin\t"
              << io::format_double(fit.xmin) << '\n';
        } catch (const Error&) {
          out << name << "_degree_gamma\tn/a\n";
        }
      }
    };
  });

  // rank
  auto* rank = app.add_subcommand("rank", "PageRank or reverse PageRank of every node");
  std::string graph_path, direction_text = "forward";
  double alpha = kDefaultAlpha, tol = kDefaultTolerance;
  int max_iter = kDefaultMaxIterations;
  bool ases_only = false;
  rank->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  rank->add_option("--direction", direction_text, "forward or reverse");
  rank->add_option("--alpha", alpha, "Damping factor");
  rank->add_option("--tol", tol, "L1 convergence threshold");
  rank->add_option("--max-iter", max_iter, "Iteration cap");
  rank->add_flag("--ases-only", ases_only, "Rank ASes only");
  rank->add_option("--out", out_path, "CSV output")->required();
  rank->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      const auto dir = direction_from_string(direction_text);
      const auto P = pagerank(GoogleMatrix(g, alpha, dir), {tol, max_iter});
      NodeFilter keep;
      if (ases_only) keep = [&](NodeIndex i) { return g.is_as(i); };
      r.params()["direction"] = std::string(to_string(dir));
      r.params()["alpha"] = alpha;
      r.params()["tol"] = tol;
      r.params()["ases_only"] = ases_only;
      r.write(out_path, io::rank_table_csv(g, rank_table(P, keep)));
      r.finish();
      out << "iterations\t" << P.iterations << "\nresidual\t" << io::format_double(P.residual) << '\n';
    };
  });

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Reduced Google matrix of a node subset");
  std::string subset_path;
  bool censor = false;
  direction_text = "forward";
  std::string reduce_direction = "reverse";
  reduce->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  reduce->add_option("--subset", subset_path, "One node label per line")->required()->check(CLI::ExistingFile);
  reduce->add_option("--direction", reduce_direction, "forward or reverse");
  reduce->add_flag("--censor-diagonal", censor, "Zero the diagonal and renormalize columns");
  reduce->add_option("--alpha", alpha, "Damping factor");
  reduce->add_option("--tol", tol, "Series solve tolerance");
  reduce->add_option("--out", out_path, "Matrix CSV output")->required();
  reduce->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      r.input(subset_path);
      const auto subset = io::read_subset(g, io::read_text(subset_path));
      const auto dir = direction_from_string(reduce_direction);
      ReduceOptions opts;
      opts.tol = tol;
      auto R = reduced_google_matrix(g, GoogleMatrix(g, alpha, dir), subset, opts);
      if (censor) R = censor_diagonal(R);
      r.params()["direction"] = std::string(to_string(dir));
      r.params()["alpha"] = alpha;
      r.params()["tol"] = tol;
      r.params()["censor_diagonal"] = censor;
      r.write(out_path, io::reduced_to_csv(R));
      r.finish();
    };
  });

  // diff
  auto* diff = app.add_subcommand("diff", "Relative change between two reduced matrices");
  std::vector<std::string> reduced_paths;
  std::vector<double> cap;
  diff->add_option("--reduced", reduced_paths, "Earlier and later matrix CSV")->required()->expected(2)->check(
      CLI::ExistingFile);
  diff->add_option("--cap", cap, "Display clamp low high")->expected(2);
  diff->add_option("--out", out_path, "CSV output")->required();
  diff->callback([&] {
    action = [&] {
      Run r(command_line);
      r.input(reduced_paths[0]);
      r.input(reduced_paths[1]);
      const auto r1 = io::reduced_from_csv(io::read_text(reduced_paths[0]));
      const auto r2 = io::reduced_from_csv(io::read_text(reduced_paths[1]));
      std::optional<std::pair<double, double>> clamp;
      if (cap.size() == 2) {
        clamp = std::pair{cap[0], cap[1]};
        r.params()["cap"] = cap;
      }
      r.write(out_path, io::change_to_csv(relative_change(r1, r2, clamp)));
      r.finish();
    };
  });

  // classify
  auto* classify = app.add_subcommand("classify", "Assign ASes to the majority country of their IXPs");
  bool plurality = false;
  std::string truth_path, metrics_out, countries_text;
  classify->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  classify->add_flag("--plurality", plurality, "Accept a unique plurality instead of a strict majority");
  classify->add_option("--truth", truth_path, "AS-org ground truth (asn,country)")->check(CLI::ExistingFile);
  classify->add_option("--countries", countries_text, "Comma-separated countries to score");
  classify->add_option("--metrics-out", metrics_out, "Per-country precision/recall CSV");
  classify->add_option("--out", out_path, "CSV output")->required();
  classify->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      const auto assign = classify_countries(g, {plurality});
      r.params()["plurality"] = plurality;
      std::ostringstream table;
      table << "asn,country\n";
      std::size_t tied = 0;
      for (const auto& [asn, cc] : assign) {
        table << asn << ',' << cc << '\n';
        if (cc == kTied) ++tied;
      }
      r.write(out_path, table.str());
      out << "ases\t" << assign.size() << "\ntied\t" << tied << '\n';
      if (!truth_path.empty()) {
        r.input(truth_path);
        const auto truth = load_ground_truth(fs::path(truth_path), {});
        auto countries = split_list(countries_text);
        if (countries.empty()) {
          std::set<std::string> all;
          for (const auto& [asn, cc] : assign) {
            if (cc != kTied) all.insert(cc);
          }
          countries.assign(all.begin(), all.end());
        }
        const auto report = classification_metrics(assign, truth, countries);
        std::ostringstream m;
        m << "country,precision,recall,f1,support\n";
        for (const auto& c : report.countries) {
          m << c.country << ',' << io::format_double(c.precision) << ',' << io::format_double(c.recall) << ','
            << io::format_double(c.f1) << ',' << c.support << '\n';
        }
        for (const auto& c : report.zero_support) out << "zero_support\t" << c << '\n';
        if (metrics_out.empty()) {
          out << m.str();
        } else {
          r.write(metrics_out, m.str());
        }
      }
      r.finish();
    };
  });

  // hypergiants
  auto* hyper = app.add_subcommand("hypergiants", "Top ASes by reverse PageRank");
  std::size_t k = 20;
  hyper->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  hyper->add_option("--k", k, "Number of ASes");
  hyper->add_option("--alpha", alpha, "Damping factor");
  hyper->add_option("--out", out_path, "CSV output")->required();
  hyper->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      const auto table = hypergiants(g, k, {alpha, {}});
      r.params()["k"] = k;
      r.params()["alpha"] = alpha;
      std::ostringstream csv;
      csv << "rank,asn,name,info_ratio,rpr\n";
      for (const auto& e : table) {
        const auto& n = g.network(e.node);
        csv << e.rank << ',' << n.asn << ',' << io::csv_field(n.name) << ',' << abbreviation(n.info_ratio) << ','
            << io::format_double(e.value) << '\n';
      }
      r.write(out_path, csv.str());
      r.finish();
    };
  });

  // receivers
  auto* receivers = app.add_subcommand("receivers", "Top traffic receivers per country");
  std::string types_text = "ISP,ND", exclude_path;
  std::vector<std::string> apnic_paths;
  std::size_t hyper_k = 20, per_country = 4;
  receivers->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  receivers->add_option("--countries", countries_text, "Comma-separated ISO codes")->required();
  receivers->add_option("--types", types_text, "Business types: ISP, ND, NSP, Content");
  receivers->add_option("--exclude", exclude_path, "AS numbers to drop, one per line")->check(CLI::ExistingFile);
  receivers->add_option("--hypergiants-k", hyper_k, "Size of the hypergiant set removed");
  receivers->add_option("--per-country", per_country, "Receivers kept per country");
  receivers->add_option("--apnic", apnic_paths, "APNIC tables (asn,country,eums,rank)")->check(CLI::ExistingFile);
  receivers->add_flag("--plurality", plurality, "Plurality country assignment");
  receivers->add_option("--alpha", alpha, "Damping factor");
  receivers->add_option("--out", out_path, "CSV output")->required();
  receivers->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      ReceiverOptions opts;
      opts.per_country = per_country;
      opts.business_types.clear();
      for (const auto& t : split_list(types_text)) opts.business_types.insert(business_type_from_code(t));
      if (!exclude_path.empty()) {
        r.input(exclude_path);
        opts.exclusions = read_asn_set(exclude_path);
      }
      const GoogleMatrix reverse(g, alpha, Direction::Reverse);
      for (const auto& e : hypergiants(g, pagerank(reverse), std::min(hyper_k, g.num_ases()))) {
        opts.hypergiants.insert(g.network(e.node).asn);
      }
      const auto pr = pagerank(GoogleMatrix(g, alpha, Direction::Forward));
      const auto countries = split_list(countries_text);
      const auto table =
          traffic_receivers(g, pr, classify_countries(g, {plurality}), countries, opts);
      std::vector<fs::path> apnic(apnic_paths.begin(), apnic_paths.end());
      for (const auto& p : apnic) r.input(p);
      const auto truth = load_ground_truth(std::nullopt, apnic);
      std::ostringstream csv;
      csv << "country,rank,asn,name,info_type,pr,eums\n";
      for (const auto& c : countries) {
        for (const auto& e : table.at(c)) {
          const auto& n = g.network(e.node);
          csv << c << ',' << e.rank << ',' << n.asn << ',' << io::csv_field(n.name) << ','
              << io::csv_field(n.info_type) << ',' << io::format_double(e.value) << ','
              << io::format_double(truth.eums_of(n.asn, c)) << '\n';
        }
        if (table.at(c).empty()) out << "empty\t" << c << '\n';
      }
      if (!apnic.empty()) {
        for (const auto& [c, v] : eums_coverage(g, table, truth)) out << "eums\t" << c << '\t' << io::format_double(v) << '\n';
      }
      r.params()["types"] = split_list(types_text);
      r.params()["hypergiants_k"] = hyper_k;
      r.params()["per_country"] = per_country;
      r.params()["alpha"] = alpha;
      r.write(out_path, csv.str());
      r.finish();
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Rank stability of probe ASes over a beta grid");
  std::string grid_h = "0.9:1.0:20", grid_m = "0.6:0.8:20", probes_path;
  std::size_t per_class = 4;
  sweep->add_option("--snapshot", snapshot_path, "PeeringDB dump (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--date", date_text, "Snapshot date YYYY-MM-DD")->required();
  sweep->add_option("--grid-h", grid_h, "beta_h grid low:high:count (values >= 1 dropped)");
  sweep->add_option("--grid-m", grid_m, "beta_m grid low:high:count");
  sweep->add_option("--probes", probes_path, "Probe AS numbers, one per line")->check(CLI::ExistingFile);
  sweep->add_option("--per-class", per_class, "Default probes per traffic class");
  sweep->add_option("--alpha", alpha, "Damping factor");
  sweep->add_option("--out", out_path, "CSV output")->required();
  sweep->callback([&] {
    action = [&] {
      Run r(command_line);
      r.input(snapshot_path);
      const auto s = parse_snapshot(snapshot_path, Date::parse(date_text));
      auto hs = parse_grid(grid_h);
      std::erase_if(hs, [](double h) { return h >= 1.0; });
      const auto ms = parse_grid(grid_m);
      SweepOptions opts;
      opts.per_class = per_class;
      opts.spectral.alpha = alpha;
      opts.threads = threads;
      if (!probes_path.empty()) {
        r.input(probes_path);
        for (Asn a : read_asn_set(probes_path)) opts.probes.push_back(a);
      }
      const auto report = beta_stability_sweep(s, hs, ms, opts);
      const auto g = build_cgraph(s, opts.reference);
      std::ostringstream csv;
      csv << "asn,name,info_ratio,pr,pr_rank,delta_pr,rpr,rpr_rank,delta_rpr,delta_pr_value,delta_rpr_value\n";
      for (const auto& p : report.probes) {
        csv << p.asn << ',' << io::csv_field(g.network(*g.find_as(p.asn)).name) << ','
            << abbreviation(p.traffic_class) << ',' << io::format_double(p.pr) << ',' << p.pr_rank << ','
            << p.delta_pr << ',' << io::format_double(p.rpr) << ',' << p.rpr_rank << ',' << p.delta_rpr << ','
            << io::format_double(p.delta_pr_value) << ',' << io::format_double(p.delta_rpr_value) << '\n';
      }
      r.params()["grid_h"] = hs;
      r.params()["grid_m"] = ms;
      r.params()["alpha"] = alpha;
      r.params()["per_class"] = per_class;
      r.write(out_path, csv.str());
      r.finish();
      out << "grid_points\t" << report.grid_points << "\nprobes\t" << report.probes.size() << '\n';
    };
  });

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Louvain communities under bipartite modularity");
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::string profile_out;
  cluster->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  cluster->add_option("--seed", seed, "Seed for the shuffled visit order");
  cluster->add_flag("--shuffle", shuffle, "Visit nodes in seeded random order");
  std::size_t restarts = LouvainOptions{}.restarts;
  cluster->add_option("--restarts", restarts, "Extra runs in seeded shuffled orders; the best is kept");
  cluster->add_option("--profile-out", profile_out, "Per-cluster IXP profile CSV");
  cluster->add_option("--out", out_path, "Partition CSV")->required();
  cluster->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      LouvainOptions lo;
      lo.seed = seed;
      lo.shuffle = shuffle;
      lo.restarts = restarts;
      const auto p = louvain_bipartite(symmetrize(g), lo);
      std::ostringstream csv;
      csv << "node,type,community\n";
      for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
        csv << g.label(i) << ',' << (g.is_as(i) ? "AS" : "IXP") << ',' << p.community[i] << '\n';
      }
      r.params()["seed"] = seed;
      r.params()["shuffle"] = shuffle;
      r.params()["restarts"] = restarts;
      r.write(out_path, csv.str());
      std::ostringstream prof;
      prof << "cluster,countries,distinct_countries,capacity_percent,ixp_percent,ixps,ases\n";
      for (const auto& c : cluster_profile(p, g)) {
        prof << c.community << ',' << io::csv_field(country_summary(c)) << ',' << c.distinct_countries << ','
             << io::format_double(c.capacity_percent) << ',' << io::format_double(c.ixp_percent) << ',' << c.ixps
             << ',' << c.ases << '\n';
      }
      if (profile_out.empty()) {
        out << prof.str();
      } else {
        r.write(profile_out, prof.str());
      }
      r.finish();
      out << "communities\t" << p.num_communities << "\nmodularity\t" << io::format_double(p.modularity) << '\n';
    };
  });

  // export
  auto* exporter = app.add_subcommand("export", "Export a graph for external tools");
  std::string format = "gexf";
  exporter->add_option("--graph", graph_path, "Graph file")->required()->check(CLI::ExistingFile);
  exporter->add_option("--format", format, "gexf, edgelist or csv")
      ->check(CLI::IsMember({"gexf", "edgelist", "csv"}));
  exporter->add_option("--out", out_path, "Output file")->required();
  exporter->callback([&] {
    action = [&] {
      Run r(command_line);
      const auto g = GraphInput{graph_path}.load(r);
      r.params()["format"] = format;
      const std::string text =
          format == "gexf" ? io::to_gexf(g) : format == "edgelist" ? io::to_edgelist(g) : io::node_table_csv(g);
      r.write(out_path, text);
      r.finish();
    };
  });

  // timeseries
  auto* series = app.add_subcommand("timeseries", "Total port capacity across dated dumps");
  std::vector<std::string> inputs;
  bool breakpoint = false;
  series->add_option("--input", inputs, "DATE=PATH, repeatable")->required();
  series->add_flag("--breakpoint", breakpoint, "Fit a two-segment linear trend");
  series->add_option("--out", out_path, "CSV output")->required();
  series->callback([&] {
    action = [&] {
      Run r(command_line);
      std::vector<std::pair<Date, std::string>> dated;
      for (const auto& in : inputs) {
        auto eq = in.find('=');
        if (eq == std::string::npos) throw Error("--input expects DATE=PATH, got '" + in + "'");
        dated.emplace_back(Date::parse(in.substr(0, eq)), in.substr(eq + 1));
      }
      std::sort(dated.begin(), dated.end());
      std::vector<RawSnapshot> snaps(dated.size());
      for (const auto& [d, p] : dated) r.input(p);
      parallel_for(dated.size(), threads,
                   [&](std::size_t i) { snaps[i] = parse_snapshot(dated[i].second, dated[i].first); });
      const auto ts = capacity_timeseries(snaps);
      std::ostringstream csv;
      csv << "date,capacity_mbps\n";
      for (const auto& p : ts) csv << p.date.str() << ',' << io::format_double(p.capacity) << '\n';
      r.write(out_path, csv.str());
      r.finish();
      if (breakpoint) {
        const auto fit = breakpoint_fit(ts);
        out << "break_date\t" << fit.break_date.str() << "\nslope1_gbit_per_day\t"
            << io::format_double(fit.slope1 / 1000.0) << "\nslope2_gbit_per_day\t"
            << io::format_double(fit.slope2 / 1000.0) << '\n';
      }
    };
  });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("peergraph");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << app.get_name() << ": error: " << msg << '\n';
    return e.get_exit_code();
  }

  set_default_threads(threads);
  try {
    if (action) action();
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << app.get_name() << ": error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace peergraph::cli
