#ifndef RMSTBART_MODEL_IO_HPP
#define RMSTBART_MODEL_IO_HPP

#include <string>
#include <vector>

#include "rmstbart/sampler.hpp"
#include "rmstbart/survival_data.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

/// Persisted fit: retained forest draws plus everything needed to predict.
struct FitArtifact {
  int format_version = 1;
  double mu_hat_b = 0.0;
  double tau = 0.0;
  TimeTransform transform = TimeTransform::identity;
  double eta = 0.0;
  double sigma_mu = 0.0;
  double sigma_r2 = 0.0;
  double kappa = 2.0;
  std::uint64_t seed = 0;
  std::string censoring;
  bool fixed_weights = false;
  double weight_cap = 20.0;
  std::uint64_t capped_weight_events = 0;
  std::vector<std::string> covariate_names;
  TreePriorParams tree_prior;
  CutpointGrid grid;
  std::vector<Forest> forests;
};

/// JSON round trip. Trees serialize as nested node records
/// {"var":v,"cut":c,"left":...,"right":...} with {"leaf":value} terminals.
std::string fit_artifact_to_json(const FitArtifact& artifact);
FitArtifact fit_artifact_from_json(const std::string& text);

void save_fit_artifact(const FitArtifact& artifact, const std::string& path);
FitArtifact load_fit_artifact(const std::string& path);

/// Writes via a temporary file in the destination directory and renames, so
/// a failed run never leaves partial output.
void atomic_write_file(const std::string& path, const std::string& contents);

}  // namespace rmstbart

#endif
