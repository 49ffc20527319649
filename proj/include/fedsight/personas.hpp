#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fedsight/core.hpp"

namespace fedsight::personas {

// ---------------------------------------------------------------------------
// Feature encoding
// ---------------------------------------------------------------------------

// How one encoded column was produced. Numeric columns are z-scored against
// the member dataset; one-hot columns carry their categorical level; binary
// flags pass through as 0/1. Constant columns are dropped at build time.
struct FeatureColumn {
  enum class Kind { numeric, one_hot, binary };
  Kind kind = Kind::numeric;
  std::string source;  // MemberProfile field name
  std::string level;   // one_hot only
  double mean = 0.0;   // numeric only
  double stddev = 1.0;
  std::string name() const {
    return kind == Kind::one_hot ? source + "=" + level : source;
  }
};

// Encoding schema derived from a member dataset. Also remembers dropped
// constants (so decoding can still answer) and dataset tercile cuts for the
// numeric fields, which drive the persona template's low/medium/high bands.
class FeatureSchema {
 public:
  static FeatureSchema build(const std::vector<MemberProfile>& members);

  const std::vector<FeatureColumn>& columns() const { return columns_; }
  std::size_t dimension() const { return columns_.size(); }
  std::vector<std::string> feature_names() const;

  std::vector<double> encode(const MemberProfile& p) const;  // throws on unknown level

  // Index of the first column for `source`, or -1 when the field was dropped
  // as constant.
  int column_of(const std::string& source) const;

  // Argmax level over the one-hot block for `source`; for a dropped constant
  // block returns the remembered constant level.
  std::string decode_categorical(const std::vector<double>& vec,
                                 const std::string& source) const;

  // Which tercile of the (z-scored) member distribution `z` falls in:
  // 0 = low, 1 = medium, 2 = high. `source` must be a numeric field.
  int tercile(const std::string& source, double z) const;

  // Total one-hot mass for `source` levels other than `excluded_level`.
  double one_hot_mass(const std::vector<double>& vec, const std::string& source,
                      const std::string& excluded_level) const;

 private:
  std::vector<FeatureColumn> columns_;
  // source -> constant level (categorical fields dropped as constant)
  std::vector<std::pair<std::string, std::string>> constant_levels_;
  // source -> (lower cut, upper cut) in z units
  std::vector<std::pair<std::string, std::pair<double, double>>> tercile_cuts_;
};

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct ClusteringResult {
  std::vector<int> assignments;               // one per input vector
  std::vector<std::vector<double>> centroids;  // k rows
  double inertia = 0.0;
  int iterations = 0;   // Lloyd iterations of the winning restart
  int restart_index = 0;
};

// Called once per Lloyd iteration of every restart with the inertia measured
// after the assignment step; the sequence within a restart is non-increasing.
using KmeansObserver = std::function<void(int restart, int iteration, double inertia)>;

inline constexpr int kKmeansRestarts = 10;
inline constexpr int kKmeansMaxIterations = 300;

// Lloyd's algorithm with k-means++ seeding, `restarts` independent restarts
// (lowest inertia wins, ties by restart index). Deterministic given seed and
// invariant under permutation of the inputs (seeding works on a canonically
// sorted view). Restarts run in parallel when OpenMP is enabled.
ClusteringResult kmeans(const std::vector<std::vector<double>>& vectors, int k,
                        std::uint64_t seed, int restarts = kKmeansRestarts,
                        int max_iterations = kKmeansMaxIterations,
                        const KmeansObserver& observer = nullptr);

// ---------------------------------------------------------------------------
// Personas
// ---------------------------------------------------------------------------

// Labels the k=3 centroids: highest regional one-hot mass (levels other than
// "Board") -> regional_pragmatist; of the remaining two the higher tenure
// centroid -> academic_balancer; the last -> central_policymaker.
std::vector<Archetype> assign_archetypes(
    const std::vector<std::vector<double>>& centroids, const FeatureSchema& schema);

// Deterministic template: display name, hawkishness band by dataset tercile,
// focus sentences for centroid values > 0.5, tenure band.
Persona materialize_persona(const std::vector<double>& centroid, Archetype label,
                            const FeatureSchema& schema);

// Full pipeline: encode -> kmeans(k=3) -> label -> materialize. Personas are
// returned ordered regional_pragmatist, academic_balancer, central_policymaker.
std::vector<Persona> build_personas(const std::vector<MemberProfile>& members,
                                    std::uint64_t seed,
                                    ClusteringResult* result_out = nullptr);

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

// members.csv: header name,hawkishness,regional_affiliation,gender,
// political_party,focus_labor,focus_inflation,focus_banking,focus_global,
// tenure_years; flags are 0/1.
std::vector<MemberProfile> load_members_csv(const std::filesystem::path& file);

void save_personas_json(const std::filesystem::path& file,
                        const std::vector<Persona>& personas,
                        const std::vector<std::string>& feature_names);
std::vector<Persona> load_personas_json(const std::filesystem::path& file);

}  // namespace fedsight::personas
