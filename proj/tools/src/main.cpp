// zdclone -- command-line front end for the library.
//
// Every construction and verification is a subcommand; each one emits a
// structured JSON report (exact integers and rationals as decimal strings
// and "p/q") that embeds the effective configuration and the tool version,
// so re-running with the same inputs reproduces the report byte for byte.
// `--summary` switches stdout to a short human-oriented table; `--report`
// additionally writes the JSON body to a file.
//
// Exit codes: 0 success, 1 usage or parse error, 2 construction or search
// failure, 3 verification failure.

#include <zdclone/badness.hpp>
#include <zdclone/density.hpp>
#include <zdclone/finfun.hpp>
#include <zdclone/monoid.hpp>
#include <zdclone/nat.hpp>
#include <zdclone/natset.hpp>
#include <zdclone/precomplete.hpp>
#include <zdclone/term.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using zdclone::Nat;
using zdclone::Rat;
using Json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kSearch = 2;
constexpr int kVerify = 3;

// Thrown for anything that should end the run with a usage/parse exit.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- configuration -------------------------------------------------------------

// The knobs every subcommand draws from.  A JSON config file (--config) can
// set any of them; subcommand flags override the file.
struct RunConfig {
  Nat enum_horizon = Nat(1) << 20;   // set-enumeration horizon
  Nat image_horizon = Nat(1) << 20;  // image / probe / density horizon (t_max)
  Nat output_bound = Nat(1) << 12;   // right-inverse output bound
  std::size_t k_max = 14;            // deepest dyadic block

  Rat epsilon = Rat(1, 3);
  Rat delta = Rat(1, 10);
  std::size_t stages = 3;            // witness stages J

  Nat m_max = Nat(1) << 35;          // witness slice-start horizon
  Nat n_max = Nat(1) << 36;          // witness slice-end horizon

  Nat e_max = 1024;                  // pipeline scale-factor cap
  std::size_t anchor_count = 5;

  Nat monoid_n = 2000;               // monoid cache horizon N
  std::size_t branch_cap = 4096;     // most branches a monoid run will take

  bool confirm_cost = false;         // allow arity >= 3 image enumerations
};

Nat nat_from_json(const Json& j, const char* key) {
  if (j.is_string()) return zdclone::parse_nat(j.get<std::string>());
  if (j.is_number_unsigned()) return Nat(j.get<std::uint64_t>());
  throw UsageError(std::string("config: ") + key + " must be a decimal string or integer");
}

Rat rat_from_json(const Json& j, const char* key) {
  if (j.is_string()) return zdclone::parse_rat(j.get<std::string>());
  if (j.is_number_unsigned()) return Rat(j.get<std::uint64_t>());
  throw UsageError(std::string("config: ") + key + " must be \"p/q\" or an integer");
}

std::size_t size_from_json(const Json& j, const char* key) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_string()) return static_cast<std::size_t>(zdclone::parse_nat(j.get<std::string>()));
  throw UsageError(std::string("config: ") + key + " must be an integer");
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file " + path + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "enum_horizon") cfg.enum_horizon = nat_from_json(v, key.c_str());
    else if (key == "image_horizon") cfg.image_horizon = nat_from_json(v, key.c_str());
    else if (key == "output_bound") cfg.output_bound = nat_from_json(v, key.c_str());
    else if (key == "k_max") cfg.k_max = size_from_json(v, key.c_str());
    else if (key == "epsilon") cfg.epsilon = rat_from_json(v, key.c_str());
    else if (key == "delta") cfg.delta = rat_from_json(v, key.c_str());
    else if (key == "stages") cfg.stages = size_from_json(v, key.c_str());
    else if (key == "m_max") cfg.m_max = nat_from_json(v, key.c_str());
    else if (key == "n_max") cfg.n_max = nat_from_json(v, key.c_str());
    else if (key == "e_max") cfg.e_max = nat_from_json(v, key.c_str());
    else if (key == "anchor_count") cfg.anchor_count = size_from_json(v, key.c_str());
    else if (key == "monoid_n") cfg.monoid_n = nat_from_json(v, key.c_str());
    else if (key == "branch_cap") cfg.branch_cap = size_from_json(v, key.c_str());
    else if (key == "confirm_cost") {
      if (!v.is_boolean()) throw UsageError("config: confirm_cost must be a boolean");
      cfg.confirm_cost = v.get<bool>();
    } else {
      throw UsageError("config file " + path + ": unknown key \"" + key + "\"");
    }
  }
}

Json nat_json(const Nat& n) { return n.str(); }
Json rat_json(const Rat& q) { return zdclone::to_string(q); }

Json config_json(const RunConfig& c) {
  Json j;
  j["enum_horizon"] = nat_json(c.enum_horizon);
  j["image_horizon"] = nat_json(c.image_horizon);
  j["output_bound"] = nat_json(c.output_bound);
  j["k_max"] = c.k_max;
  j["epsilon"] = rat_json(c.epsilon);
  j["delta"] = rat_json(c.delta);
  j["stages"] = c.stages;
  j["m_max"] = nat_json(c.m_max);
  j["n_max"] = nat_json(c.n_max);
  j["e_max"] = nat_json(c.e_max);
  j["anchor_count"] = c.anchor_count;
  j["monoid_n"] = nat_json(c.monoid_n);
  j["branch_cap"] = c.branch_cap;
  j["confirm_cost"] = c.confirm_cost;
  return j;
}

// --- input resolution --------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string strip(const std::string& s) {
  std::size_t lo = s.find_first_not_of(" \t\r\n");
  if (lo == std::string::npos) return "";
  std::size_t hi = s.find_last_not_of(" \t\r\n");
  return s.substr(lo, hi - lo + 1);
}

// A spec argument is either inline text or "@path" naming a file holding it.
std::string resolve_spec(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return strip(read_file(arg.substr(1)));
  return arg;
}

zdclone::FinFun parse_function(const std::string& arg) {
  try {
    return zdclone::FinFun::parse(resolve_spec(arg));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("function spec: ") + e.what());
  }
}

zdclone::NatSet parse_set(const std::string& arg) {
  try {
    return zdclone::NatSet::parse(resolve_spec(arg));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("set spec: ") + e.what());
  }
}

void require_cost_confirmation(const RunConfig& cfg, std::size_t arity) {
  if (arity >= 3 && !cfg.confirm_cost)
    throw UsageError("image enumeration for arity >= 3 grows as count^arity; "
                     "pass --confirm-cost to proceed");
}

// --- report emission ------------------------------------------------------------------

struct Emit {
  std::string report_path;  // --report target, empty for none
  bool summary = false;
};

// Builds the envelope, writes the JSON (stdout unless --summary; file when
// --report), and prints the summary lines when asked.
void emit_report(const Emit& emit, const RunConfig& cfg, const std::string& command,
                 const Json& inputs, const Json& result, const std::string& summary_text) {
  Json report;
  report["tool"] = "zdclone";
  report["version"] = zdclone::version();
  report["command"] = command;
  report["config"] = config_json(cfg);
  report["inputs"] = inputs;
  report["result"] = result;
  std::string body = report.dump(2);
  body.push_back('\n');
  if (!emit.report_path.empty()) {
    std::ofstream out(emit.report_path, std::ios::binary);
    if (!out) throw UsageError("cannot write report file: " + emit.report_path);
    out << body;
  }
  if (emit.summary)
    std::cout << summary_text;
  else
    std::cout << body;
}

std::string flag(bool b) { return b ? "yes" : "no"; }

// --- subcommands --------------------------------------------------------------------------

int cmd_density(const RunConfig& cfg, const Emit& emit, const std::string& set_arg) {
  zdclone::NatSet s = parse_set(set_arg);
  auto horizons = zdclone::dyadic_horizons(cfg.image_horizon);
  auto report = zdclone::upper_density_estimate(s, horizons);

  // Dyadic block table alongside the prefix ladder: [2^k, 2^{k+1}) ratios
  // for every block fully below the horizon.
  std::size_t blocks_k_max = 0;
  while (zdclone::pow2(blocks_k_max + 2) <= cfg.image_horizon) ++blocks_k_max;
  std::vector<Rat> block_ratios;
  if (zdclone::pow2(1) <= cfg.image_horizon)
    block_ratios = zdclone::dyadic_block_densities(s, blocks_k_max);

  Json result;
  result["set"] = s.to_text();
  Json samples = Json::array();
  for (const auto& sm : report.samples) {
    Json row;
    row["horizon"] = nat_json(sm.horizon);
    row["count"] = nat_json(sm.count);
    row["ratio"] = rat_json(sm.ratio);
    samples.push_back(row);
  }
  result["samples"] = samples;
  result["estimate"] = rat_json(report.estimate);
  result["argmax_horizon"] = nat_json(report.argmax_horizon);
  Json blocks = Json::array();
  for (std::size_t k = 0; k < block_ratios.size(); ++k) {
    Json row;
    row["k"] = k;
    row["ratio"] = rat_json(block_ratios[k]);
    blocks.push_back(row);
  }
  result["dyadic_blocks"] = blocks;

  std::ostringstream sum;
  sum << "density of " << s.to_text() << " up to " << cfg.image_horizon << "\n";
  sum << "  horizon count ratio\n";
  for (const auto& sm : report.samples)
    sum << "  " << sm.horizon << " " << sm.count << " " << zdclone::to_string(sm.ratio) << "\n";
  sum << "estimate " << zdclone::to_string(report.estimate) << " at horizon "
      << report.argmax_horizon << "\n";

  Json inputs;
  inputs["set"] = set_arg;
  emit_report(emit, cfg, "density", inputs, result, sum.str());
  return kOk;
}

int cmd_badness(const RunConfig& cfg, const Emit& emit, const std::string& fn_arg,
                const std::string& set_arg, const std::string& certificate_path) {
  zdclone::FinFun f = parse_function(fn_arg);
  zdclone::NatSet b = parse_set(set_arg);
  require_cost_confirmation(cfg, f.arity());

  zdclone::WitnessSearchLimits limits{cfg.m_max, cfg.n_max, cfg.image_horizon};
  auto found = zdclone::assemble_global_witness(f, b, cfg.epsilon, cfg.stages, limits);

  Json result;
  result["complete"] = found.complete;
  result["stages_found"] = found.stages_found;
  result["failure"] = found.failure == zdclone::WitnessFailure::none
                          ? ""
                          : zdclone::to_string(found.failure);
  result["detail"] = found.detail;
  Json entries = Json::array();
  for (const auto& e : found.certificate.entries) {
    Json row;
    row["i"] = nat_json(e.i);
    row["m"] = nat_json(e.m);
    row["n"] = nat_json(e.n);
    row["t"] = nat_json(e.t);
    row["size"] = e.a.size();
    entries.push_back(row);
  }
  result["entries"] = entries;

  bool valid = false;
  if (found.complete) {
    auto validation = zdclone::validate_certificate(f, found.certificate);
    valid = validation.valid;
    Json vj;
    vj["valid"] = validation.valid;
    vj["failed_entry"] = validation.failed_entry;
    vj["detail"] = validation.detail;
    result["validation"] = vj;

    auto decay = zdclone::density_decay_check(found.certificate, cfg.delta);
    Json dj;
    dj["v"] = nat_json(decay.v);
    dj["clamped_index"] = decay.clamped_index;
    dj["degenerate_index"] = decay.degenerate_index;
    dj["s"] = nat_json(decay.s);
    dj["range_empty"] = decay.range_empty;
    dj["literal_holds"] = decay.literal_holds;
    dj["s_effective"] = nat_json(decay.s_effective);
    dj["effective_holds"] = decay.effective_holds;
    dj["union_size"] = nat_json(decay.union_size);
    dj["n_final"] = nat_json(decay.n_final);
    result["decay"] = dj;

    if (!certificate_path.empty()) {
      std::ofstream out(certificate_path, std::ios::binary);
      if (!out) throw UsageError("cannot write certificate file: " + certificate_path);
      out << zdclone::serialize_certificate(found.certificate);
    }
  }

  std::ostringstream sum;
  sum << "witness search for " << f.to_text() << " over " << b.to_text() << ", epsilon "
      << zdclone::to_string(cfg.epsilon) << ", " << cfg.stages << " stages\n";
  sum << "  complete " << flag(found.complete) << ", stages found " << found.stages_found << "\n";
  for (const auto& e : found.certificate.entries)
    sum << "  i=" << e.i << " m=" << e.m << " n=" << e.n << " t=" << e.t << " |A|=" << e.a.size()
        << "\n";
  if (!found.complete) sum << "  failure: " << found.detail << "\n";

  Json inputs;
  inputs["function"] = fn_arg;
  inputs["set"] = set_arg;
  if (!certificate_path.empty()) inputs["certificate"] = certificate_path;
  emit_report(emit, cfg, "badness", inputs, result, sum.str());
  if (!found.complete) return kSearch;
  return valid ? kOk : kVerify;
}

int cmd_probe(const RunConfig& cfg, const Emit& emit, const std::string& fn_arg,
              const std::string& set_arg) {
  zdclone::FinFun f = parse_function(fn_arg);
  zdclone::NatSet a = parse_set(set_arg);
  require_cost_confirmation(cfg, f.arity());

  auto probe = zdclone::membership_probe(f, a, cfg.image_horizon);

  Json result;
  result["witnessed"] = probe.witnessed;
  result["first_block"] = probe.first_block;
  result["horizon"] = nat_json(probe.horizon);
  Json blocks = Json::array();
  for (const auto& blk : probe.blocks) {
    Json row;
    row["k"] = blk.k;
    row["image_ratio"] = rat_json(blk.image_ratio);
    row["input_ratio"] = rat_json(blk.input_ratio);
    blocks.push_back(row);
  }
  result["blocks"] = blocks;

  std::ostringstream sum;
  sum << "probe of " << f.to_text() << " on " << a.to_text() << " below " << probe.horizon
      << "\n";
  sum << "  witnessed " << flag(probe.witnessed);
  if (probe.witnessed) sum << " from block " << probe.first_block;
  sum << "\n";

  Json inputs;
  inputs["function"] = fn_arg;
  inputs["set"] = set_arg;
  emit_report(emit, cfg, "probe", inputs, result, sum.str());
  return probe.witnessed ? kOk : kSearch;
}

int cmd_onto(const RunConfig& cfg, const Emit& emit, const std::string& seq_arg) {
  zdclone::NatSet seq_set = parse_set(seq_arg);
  std::vector<Nat> sequence = seq_set.elements_below(cfg.enum_horizon);
  zdclone::OntoConstruction oc;
  try {
    oc = zdclone::build_onto_construction(sequence, cfg.k_max);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("onto construction: ") + e.what());
  }
  Nat value_horizon = zdclone::pow2(cfg.k_max + 1);
  auto coverage = zdclone::verify_onto(oc, value_horizon);
  auto sparsity = zdclone::verify_column_sparsity(oc);

  Json result;
  result["input_count"] = oc.input_sequence.size();
  result["working_count"] = oc.working_sequence.size();
  result["dropped_count"] = oc.dropped_count;
  result["k_max"] = oc.k_max;
  Json blocks = Json::array();
  for (const auto& blk : oc.blocks) {
    Json row;
    row["k"] = blk.k;
    row["m"] = nat_json(blk.m);
    row["d"] = nat_json(blk.d);
    blocks.push_back(row);
  }
  result["blocks"] = blocks;
  Json pair;
  pair["x"] = nat_json(oc.one_pair.first);
  pair["y"] = nat_json(oc.one_pair.second);
  pair["from_surplus"] = oc.one_from_surplus;
  result["one_pair"] = pair;
  Json cov;
  cov["covers"] = coverage.covers;
  cov["horizon"] = nat_json(coverage.horizon);
  if (!coverage.covers) cov["first_missing"] = nat_json(coverage.first_missing);
  result["coverage"] = cov;
  Json sp;
  sp["counts_match"] = sparsity.counts_match;
  sp["ratio_bound_holds"] = sparsity.ratio_bound_holds;
  Json ratios = Json::array();
  for (const auto& r : sparsity.block_ratios) ratios.push_back(rat_json(r));
  sp["block_ratios"] = ratios;
  result["sparsity"] = sp;

  std::ostringstream sum;
  sum << "onto construction from " << sequence.size() << " inputs, k_max " << oc.k_max << "\n";
  sum << "  k m d\n";
  for (const auto& blk : oc.blocks)
    sum << "  " << blk.k << " " << blk.m << " " << blk.d << "\n";
  sum << "  preimage of 1: (" << oc.one_pair.first << ", " << oc.one_pair.second << ") "
      << (oc.one_from_surplus ? "surplus" : "fallback") << "\n";
  sum << "  covers [0, " << coverage.horizon << "): " << flag(coverage.covers) << "\n";
  sum << "  column sparsity: counts " << flag(sparsity.counts_match) << ", ratio bound "
      << flag(sparsity.ratio_bound_holds) << "\n";

  Json inputs;
  inputs["sequence"] = seq_arg;
  emit_report(emit, cfg, "onto", inputs, result, sum.str());
  if (!coverage.covers || !sparsity.counts_match || !sparsity.ratio_bound_holds) return kVerify;
  return kOk;
}

zdclone::PipelineConfig pipeline_config(const RunConfig& cfg) {
  zdclone::PipelineConfig pc;
  pc.enum_horizon = cfg.enum_horizon;
  pc.e_max = cfg.e_max;
  pc.anchor_count = cfg.anchor_count;
  pc.anchor_scan_horizon = cfg.enum_horizon;
  pc.k_max = cfg.k_max;
  pc.n_out = cfg.output_bound;
  pc.inverse_search_horizon = cfg.enum_horizon;
  return pc;
}

Json pipeline_json(const zdclone::PipelineResult& pr) {
  Json result;
  result["ok"] = pr.ok;
  result["failure"] = pr.failure;
  result["image_count"] = pr.image.size();
  if (!pr.image.empty()) {
    result["density_estimate"] = rat_json(pr.density_estimate);
    result["e"] = nat_json(pr.e);
  }
  Json anchors = Json::array();
  for (const auto& a : pr.large_map.anchors) anchors.push_back(nat_json(a));
  result["anchors"] = anchors;
  if (!pr.onto.blocks.empty()) {
    Json pair;
    pair["x"] = nat_json(pr.onto.one_pair.first);
    pair["y"] = nat_json(pr.onto.one_pair.second);
    pair["from_surplus"] = pr.onto.one_from_surplus;
    result["one_pair"] = pair;
    result["z_count"] = nat_json(pr.z_count);
    Json inv;
    inv["complete"] = pr.inverse.complete;
    inv["n_out"] = nat_json(pr.inverse.n_out);
    if (!pr.inverse.complete) inv["first_missing"] = nat_json(pr.inverse.first_missing);
    result["inverse"] = inv;
  }
  return result;
}

int cmd_pipeline(const RunConfig& cfg, const Emit& emit, const std::string& fn_arg,
                 const std::string& set_arg, const std::string& target_arg,
                 const Nat& gen_horizon, bool target_required, const char* command) {
  zdclone::FinFun g = parse_function(fn_arg);
  zdclone::NatSet a = parse_set(set_arg);
  if (g.arity() != 1) throw UsageError("the pipeline input function must be unary");
  if (target_required && target_arg.empty())
    throw UsageError("generate requires a target function");

  auto pr = zdclone::run_precompleteness_pipeline(g, a, pipeline_config(cfg));
  Json result = pipeline_json(pr);

  std::ostringstream sum;
  sum << "pipeline for " << g.to_text() << " on " << a.to_text() << "\n";
  sum << "  ok " << flag(pr.ok);
  if (!pr.ok) sum << " (" << pr.failure << ")";
  sum << "\n";
  if (pr.ok) {
    sum << "  image " << pr.image.size() << " elements, estimate "
        << zdclone::to_string(pr.density_estimate) << ", e " << pr.e << "\n";
    sum << "  anchors";
    for (const auto& an : pr.large_map.anchors) sum << " " << an;
    sum << "\n";
    sum << "  z_count " << pr.z_count << ", inverse complete " << flag(pr.inverse.complete)
        << "\n";
  }

  bool generated_ok = true;
  if (!target_arg.empty() && pr.ok) {
    zdclone::FinFun u = parse_function(target_arg);
    auto gen = zdclone::generate_function(pr, u, gen_horizon);
    Json gj;
    gj["target"] = u.to_text();
    gj["term"] = gen.term.to_text();
    gj["horizon"] = nat_json(gen_horizon);
    gj["equal"] = gen.comparison.equal;
    if (!gen.comparison.equal) {
      Json diff = Json::array();
      for (const auto& x : gen.comparison.first_difference) diff.push_back(nat_json(x));
      gj["first_difference"] = diff;
      gj["lhs"] = nat_json(gen.comparison.lhs_value);
      gj["rhs"] = nat_json(gen.comparison.rhs_value);
    }
    gj["values_in_range"] = gen.values_in_range;
    gj["max_value"] = nat_json(gen.max_value);
    result["generated"] = gj;
    generated_ok = gen.comparison.equal && gen.values_in_range;
    sum << "  generated " << gen.term.to_text() << "\n";
    sum << "  reproduces target on [0, " << gen_horizon << "): " << flag(gen.comparison.equal)
        << "\n";
  }

  Json inputs;
  inputs["function"] = fn_arg;
  inputs["set"] = set_arg;
  if (!target_arg.empty()) inputs["target"] = target_arg;
  emit_report(emit, cfg, command, inputs, result, sum.str());
  if (!pr.ok) return kSearch;
  return generated_ok ? kOk : kVerify;
}

int cmd_monoid(const RunConfig& cfg, const Emit& emit, const std::string& tree_path,
               const std::string& classifier_arg) {
  zdclone::PairTree tree;
  try {
    tree = zdclone::PairTree::parse(read_file(tree_path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("tree file ") + tree_path + ": " + e.what());
  }

  // Cap the branch count: rebuild the tree as independent chains for the
  // first branch_cap branches (element construction depends only on the
  // root-to-leaf label lists, so chains build the same family).
  auto branches = tree.branches();
  bool capped = branches.size() > cfg.branch_cap;
  if (capped) {
    zdclone::PairTree trimmed;
    for (std::size_t b = 0; b < cfg.branch_cap; ++b) {
      zdclone::PairTree::Node* at = nullptr;
      for (const auto& [ix, iy] : branches[b]) {
        zdclone::PairTree::Node node;
        node.ix = ix;
        node.iy = iy;
        if (at == nullptr) {
          trimmed.roots.push_back(std::move(node));
          at = &trimmed.roots.back();
        } else {
          at->children.push_back(std::move(node));
          at = &at->children.back();
        }
      }
    }
    tree = std::move(trimmed);
    branches = tree.branches();
  }

  zdclone::Partition partition =
      classifier_arg.empty() ? zdclone::Partition::mod4()
                             : zdclone::Partition::custom(parse_function(classifier_arg));

  zdclone::MonoidBuild build;
  try {
    build = zdclone::build_monoid(partition, tree, cfg.monoid_n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("monoid build: ") + e.what());
  }
  auto laws = zdclone::verify_monoid_laws(partition, build);

  Json result;
  result["n"] = nat_json(build.n);
  result["branch_count"] = branches.size();
  result["branch_cap"] = cfg.branch_cap;
  result["capped"] = capped;
  result["element_count"] = build.elements.size();
  Json lj;
  lj["shapes"] = laws.shapes_ok;
  lj["absorption"] = laws.absorption_ok;
  lj["collapse_left"] = laws.collapse_left_ok;
  lj["collapse_match"] = laws.collapse_match_ok;
  lj["closure"] = laws.closure_ok;
  lj["composites_checked"] = laws.composites_checked;
  lj["detail"] = laws.detail;
  result["laws"] = lj;

  std::ostringstream sum;
  sum << "monoid from " << tree_path << " with " << branches.size() << " branches"
      << (capped ? " (capped)" : "") << " on [0, " << build.n << ")\n";
  sum << "  elements " << build.elements.size() << ", composites checked "
      << laws.composites_checked << "\n";
  sum << "  laws: shapes " << flag(laws.shapes_ok) << ", absorption " << flag(laws.absorption_ok)
      << ", collapse-left " << flag(laws.collapse_left_ok) << ", collapse-match "
      << flag(laws.collapse_match_ok) << ", closure " << flag(laws.closure_ok) << "\n";
  if (!laws.all_ok()) sum << "  first failure: " << laws.detail << "\n";

  Json inputs;
  inputs["tree"] = tree_path;
  if (!classifier_arg.empty()) inputs["classifier"] = classifier_arg;
  emit_report(emit, cfg, "monoid", inputs, result, sum.str());
  return laws.all_ok() ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zdclone: exact finite-horizon constructions and verifications"};
  app.require_subcommand(1);

  std::string config_path;
  Emit emit;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--report", emit.report_path, "also write the JSON report to this file");
  app.add_flag("--summary", emit.summary, "print a human-oriented summary instead of JSON");

  // Flag values land in these; only ones the user actually set are applied
  // over the config file.
  std::string opt_horizon, opt_epsilon, opt_delta, opt_n;
  std::uint64_t opt_stages = 0, opt_k_max = 0, opt_branch_cap = 0;
  bool opt_confirm = false;

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // accept the global flags after the subcommand name
    sub->add_option("--horizon", opt_horizon, "main horizon for this subcommand");
    sub->add_flag("--confirm-cost", opt_confirm, "allow arity >= 3 image enumerations");
  };

  std::string arg_fn, arg_set, arg_target, arg_tree, arg_seq, arg_cert, arg_classifier;
  std::string opt_gen_horizon;

  CLI::App* density = app.add_subcommand("density", "exact prefix and block densities of a set");
  density->add_option("set", arg_set, "set spec (or @file)")->required();
  add_common(density);

  CLI::App* badness = app.add_subcommand("badness", "chained inflation witness search");
  badness->add_option("function", arg_fn, "function spec (or @file)")->required();
  badness->add_option("set", arg_set, "reservoir set spec (or @file)")->required();
  badness->add_option("--epsilon", opt_epsilon, "density threshold p/q");
  badness->add_option("--stages", opt_stages, "number of chained stages J");
  badness->add_option("--delta", opt_delta, "decay threshold p/q");
  badness->add_option("--certificate", arg_cert, "write the certificate to this file");
  add_common(badness);

  CLI::App* probe = app.add_subcommand("probe", "cheap dyadic-block membership probe");
  probe->add_option("function", arg_fn, "function spec (or @file)")->required();
  probe->add_option("set", arg_set, "input set spec (or @file)")->required();
  add_common(probe);

  CLI::App* onto = app.add_subcommand("onto", "block-onto construction from a sequence");
  onto->add_option("sequence", arg_seq, "anchor sequence as a set spec (or @file)")->required();
  onto->add_option("--k-max", opt_k_max, "deepest block");
  add_common(onto);

  CLI::App* pipeline = app.add_subcommand("pipeline", "full completion pipeline");
  pipeline->add_option("function", arg_fn, "unary function spec (or @file)")->required();
  pipeline->add_option("set", arg_set, "witness set spec (or @file)")->required();
  pipeline->add_option("--target", arg_target, "also generate this target function");
  pipeline->add_option("--gen-horizon", opt_gen_horizon, "comparison box side (default 50)");
  pipeline->add_option("--k-max", opt_k_max, "deepest block");
  add_common(pipeline);

  CLI::App* generate = app.add_subcommand("generate", "reproduce a target through the pipeline");
  generate->add_option("function", arg_fn, "unary function spec (or @file)")->required();
  generate->add_option("set", arg_set, "witness set spec (or @file)")->required();
  generate->add_option("target", arg_target, "target function spec (or @file)")->required();
  generate->add_option("--gen-horizon", opt_gen_horizon, "comparison box side (default 50)");
  generate->add_option("--k-max", opt_k_max, "deepest block");
  add_common(generate);

  CLI::App* monoid = app.add_subcommand("monoid", "build a branch family and verify its laws");
  monoid->fallthrough();
  monoid->add_option("tree", arg_tree, "tree file (zdclone-tree v1)")->required();
  monoid->add_option("--n", opt_n, "cache horizon N");
  monoid->add_option("--classifier", arg_classifier,
                     "unary cell classifier spec (default: residues mod 4)");
  monoid->add_option("--branch-cap", opt_branch_cap, "most branches to take");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);

    CLI::App* sub = app.get_subcommands().front();
    auto set_on = [&](const char* name) {
      const CLI::Option* o = sub->get_option_no_throw(name);
      return o != nullptr && o->count() > 0;
    };
    if (set_on("--horizon")) {
      Nat h = zdclone::parse_nat(opt_horizon);
      cfg.enum_horizon = h;
      cfg.image_horizon = h;
    }
    if (set_on("--epsilon")) cfg.epsilon = zdclone::parse_rat(opt_epsilon);
    if (set_on("--delta")) cfg.delta = zdclone::parse_rat(opt_delta);
    if (set_on("--stages")) cfg.stages = opt_stages;
    if (set_on("--k-max")) cfg.k_max = opt_k_max;
    if (set_on("--n")) cfg.monoid_n = zdclone::parse_nat(opt_n);
    if (set_on("--branch-cap")) cfg.branch_cap = opt_branch_cap;
    if (opt_confirm) cfg.confirm_cost = true;
    Nat gen_horizon = opt_gen_horizon.empty() ? Nat(50) : zdclone::parse_nat(opt_gen_horizon);

    if (sub == density) return cmd_density(cfg, emit, arg_set);
    if (sub == badness) return cmd_badness(cfg, emit, arg_fn, arg_set, arg_cert);
    if (sub == probe) return cmd_probe(cfg, emit, arg_fn, arg_set);
    if (sub == onto) return cmd_onto(cfg, emit, arg_seq);
    if (sub == pipeline)
      return cmd_pipeline(cfg, emit, arg_fn, arg_set, arg_target, gen_horizon, false, "pipeline");
    if (sub == generate)
      return cmd_pipeline(cfg, emit, arg_fn, arg_set, arg_target, gen_horizon, true, "generate");
    if (sub == monoid) return cmd_monoid(cfg, emit, arg_tree, arg_classifier);
    std::cerr << "zdclone: unknown subcommand\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "zdclone: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "zdclone: " << e.what() << "\n";
    return kUsage;
  } catch (const zdclone::EnumerationBudgetError& e) {
    std::cerr << "zdclone: " << e.what() << "\n";
    return kSearch;
  } catch (const std::exception& e) {
    std::cerr << "zdclone: " << e.what() << "\n";
    return kSearch;
  }
}
