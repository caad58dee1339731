#include "rmstbart/model_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "rmstbart/errors.hpp"

namespace rmstbart {

using nlohmann::json;

namespace {

json tree_to_json(const DecisionTree& tree, int id) {
  const TreeNode& nd = tree.node(id);
  if (nd.is_leaf()) return json{{"leaf", nd.leaf_value}};
  return json{{"var", nd.var},
              {"cut", nd.cut},
              {"left", tree_to_json(tree, nd.left)},
              {"right", tree_to_json(tree, nd.right)}};
}

void tree_from_json(const json& j, DecisionTree& tree, int id) {
  if (j.contains("leaf")) {
    tree.set_leaf_value(id, j.at("leaf").get<double>());
    return;
  }
  const auto [l, r] = tree.grow(id, j.at("var").get<int>(), j.at("cut").get<int>());
  tree_from_json(j.at("left"), tree, l);
  tree_from_json(j.at("right"), tree, r);
}

}  // namespace

std::string fit_artifact_to_json(const FitArtifact& artifact) {
  json j;
  j["format_version"] = artifact.format_version;
  j["mu_hat_b"] = artifact.mu_hat_b;
  j["tau"] = artifact.tau;
  j["transform"] = transform_name(artifact.transform);
  j["eta"] = artifact.eta;
  j["sigma_mu"] = artifact.sigma_mu;
  j["sigma_r2"] = artifact.sigma_r2;
  j["kappa"] = artifact.kappa;
  j["seed"] = artifact.seed;
  j["censoring"] = artifact.censoring;
  j["fixed_weights"] = artifact.fixed_weights;
  j["weight_cap"] = artifact.weight_cap;
  j["capped_weight_events"] = artifact.capped_weight_events;
  j["covariate_names"] = artifact.covariate_names;
  j["tree_prior"] = json{{"alpha_star", artifact.tree_prior.alpha_star},
                         {"beta_star", artifact.tree_prior.beta_star},
                         {"p_grow", artifact.tree_prior.p_grow},
                         {"p_prune", artifact.tree_prior.p_prune},
                         {"p_change", artifact.tree_prior.p_change},
                         {"max_depth", artifact.tree_prior.max_depth}};
  j["grid"] = artifact.grid.values;
  json draws = json::array();
  for (const auto& forest : artifact.forests) {
    json trees = json::array();
    for (const auto& tree : forest.trees) trees.push_back(tree_to_json(tree, tree.root()));
    draws.push_back(std::move(trees));
  }
  j["draws"] = std::move(draws);
  return j.dump();
}

FitArtifact fit_artifact_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw input_error(std::string("model file is not valid JSON: ") + e.what());
  }
  FitArtifact artifact;
  try {
    artifact.format_version = j.at("format_version").get<int>();
    if (artifact.format_version != 1) {
      throw input_error("unsupported model format version " +
                        std::to_string(artifact.format_version));
    }
    artifact.mu_hat_b = j.at("mu_hat_b").get<double>();
    artifact.tau = j.at("tau").get<double>();
    artifact.transform = transform_from_name(j.at("transform").get<std::string>());
    artifact.eta = j.at("eta").get<double>();
    artifact.sigma_mu = j.at("sigma_mu").get<double>();
    artifact.sigma_r2 = j.value("sigma_r2", 0.0);
    artifact.kappa = j.value("kappa", 2.0);
    artifact.seed = j.value("seed", std::uint64_t{0});
    artifact.censoring = j.value("censoring", std::string("noninf"));
    artifact.fixed_weights = j.value("fixed_weights", false);
    artifact.weight_cap = j.value("weight_cap", 20.0);
    artifact.capped_weight_events = j.value("capped_weight_events", std::uint64_t{0});
    artifact.covariate_names = j.at("covariate_names").get<std::vector<std::string>>();
    const json& tp = j.at("tree_prior");
    artifact.tree_prior.alpha_star = tp.at("alpha_star").get<double>();
    artifact.tree_prior.beta_star = tp.at("beta_star").get<double>();
    artifact.tree_prior.p_grow = tp.at("p_grow").get<double>();
    artifact.tree_prior.p_prune = tp.at("p_prune").get<double>();
    artifact.tree_prior.p_change = tp.at("p_change").get<double>();
    artifact.tree_prior.max_depth = tp.at("max_depth").get<int>();
    artifact.grid.values = j.at("grid").get<std::vector<std::vector<double>>>();
    for (const json& trees : j.at("draws")) {
      Forest forest;
      for (const json& tj : trees) {
        DecisionTree tree;
        tree_from_json(tj, tree, tree.root());
        forest.trees.push_back(std::move(tree));
      }
      artifact.forests.push_back(std::move(forest));
    }
  } catch (const json::exception& e) {
    throw input_error(std::string("malformed model file: ") + e.what());
  }
  return artifact;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  const fs::path tmp = dir / (target.filename().string() + ".tmp." +
                              std::to_string(static_cast<unsigned>(::getpid())));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write to " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw input_error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw input_error("cannot rename temporary output to " + path);
  }
}

void save_fit_artifact(const FitArtifact& artifact, const std::string& path) {
  atomic_write_file(path, fit_artifact_to_json(artifact));
}

FitArtifact load_fit_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fit_artifact_from_json(text);
}

}  // namespace rmstbart
