#include "fedsight/personas.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedsight/errors.hpp"
#include "fedsight/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fedsight::personas {

namespace {

using nlohmann::json;

struct NumericField {
  const char* name;
  double (*get)(const MemberProfile&);
};

struct CategoricalField {
  const char* name;
  std::string (*get)(const MemberProfile&);
};

struct BinaryField {
  const char* name;
  bool (*get)(const MemberProfile&);
};

// Table-4 order: stance, affiliation, demographics, focus flags, tenure.
const NumericField kLeadingNumerics[] = {
    {"hawkishness", [](const MemberProfile& p) { return p.hawkishness; }},
};
const CategoricalField kCategoricals[] = {
    {"regional_affiliation",
     [](const MemberProfile& p) { return p.regional_affiliation; }},
    {"gender", [](const MemberProfile& p) { return p.gender; }},
    {"political_party", [](const MemberProfile& p) { return p.political_party; }},
};
const BinaryField kBinaries[] = {
    {"focus_labor", [](const MemberProfile& p) { return p.focus_labor; }},
    {"focus_inflation", [](const MemberProfile& p) { return p.focus_inflation; }},
    {"focus_banking", [](const MemberProfile& p) { return p.focus_banking; }},
    {"focus_global", [](const MemberProfile& p) { return p.focus_global; }},
};
const NumericField kTrailingNumerics[] = {
    {"tenure_years", [](const MemberProfile& p) { return p.tenure_years; }},
};

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    double diff = a[d] - b[d];
    sum += diff * diff;
  }
  return sum;
}

// (lower, upper) tercile cut values of a sample: thresholds at the ceil(m/3)-th
// and ceil(2m/3)-th order statistics.
std::pair<double, double> tercile_cut_values(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  auto cut_at = [&](std::size_t numerator) {
    std::size_t idx = (numerator * m + 2) / 3;  // ceil(numerator*m/3)
    return values[std::min(idx == 0 ? 0 : idx - 1, m - 1)];
  };
  return {cut_at(1), cut_at(2)};
}

}  // namespace

FeatureSchema FeatureSchema::build(const std::vector<MemberProfile>& members) {
  if (members.empty()) throw ValidationError("cannot build a schema from zero members");
  for (const auto& m : members) m.validate();

  FeatureSchema schema;

  auto add_numeric = [&](const NumericField& field) {
    std::vector<double> values;
    values.reserve(members.size());
    for (const auto& m : members) values.push_back(field.get(m));
    double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                  static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    double stddev = std::sqrt(var / static_cast<double>(values.size()));
    if (stddev == 0.0) return;  // constant column dropped
    FeatureColumn col;
    col.kind = FeatureColumn::Kind::numeric;
    col.source = field.name;
    col.mean = mean;
    col.stddev = stddev;
    schema.columns_.push_back(col);
    std::vector<double> zs;
    zs.reserve(values.size());
    for (double v : values) zs.push_back((v - mean) / stddev);
    schema.tercile_cuts_.emplace_back(field.name, tercile_cut_values(zs));
  };

  auto add_categorical = [&](const CategoricalField& field) {
    std::set<std::string> levels;
    for (const auto& m : members) {
      std::string level = field.get(m);
      if (level.empty()) {
        throw ValidationError(std::string("member '") + m.name + "' has empty " +
                              field.name);
      }
      levels.insert(level);
    }
    if (levels.size() == 1) {  // constant block dropped, level remembered
      schema.constant_levels_.emplace_back(field.name, *levels.begin());
      return;
    }
    for (const auto& level : levels) {  // set iteration: sorted, stable
      FeatureColumn col;
      col.kind = FeatureColumn::Kind::one_hot;
      col.source = field.name;
      col.level = level;
      schema.columns_.push_back(col);
    }
  };

  auto add_binary = [&](const BinaryField& field) {
    bool first = field.get(members.front());
    bool constant = std::all_of(members.begin(), members.end(), [&](const auto& m) {
      return field.get(m) == first;
    });
    if (constant) return;
    FeatureColumn col;
    col.kind = FeatureColumn::Kind::binary;
    col.source = field.name;
    schema.columns_.push_back(col);
  };

  for (const auto& f : kLeadingNumerics) add_numeric(f);
  for (const auto& f : kCategoricals) add_categorical(f);
  for (const auto& f : kBinaries) add_binary(f);
  for (const auto& f : kTrailingNumerics) add_numeric(f);

  if (schema.columns_.empty()) {
    throw ValidationError("all member features are constant; nothing to cluster");
  }
  return schema;
}

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& col : columns_) names.push_back(col.name());
  return names;
}

std::vector<double> FeatureSchema::encode(const MemberProfile& p) const {
  p.validate();
  std::vector<double> vec;
  vec.reserve(columns_.size());
  for (const auto& col : columns_) {
    switch (col.kind) {
      case FeatureColumn::Kind::numeric: {
        double raw = 0.0;
        if (col.source == "hawkishness") {
          raw = p.hawkishness;
        } else if (col.source == "tenure_years") {
          raw = p.tenure_years;
        } else {
          throw ValidationError("unknown numeric feature " + col.source);
        }
        vec.push_back((raw - col.mean) / col.stddev);
        break;
      }
      case FeatureColumn::Kind::one_hot: {
        std::string level;
        if (col.source == "regional_affiliation") {
          level = p.regional_affiliation;
        } else if (col.source == "gender") {
          level = p.gender;
        } else if (col.source == "political_party") {
          level = p.political_party;
        } else {
          throw ValidationError("unknown categorical feature " + col.source);
        }
        vec.push_back(level == col.level ? 1.0 : 0.0);
        break;
      }
      case FeatureColumn::Kind::binary: {
        bool flag = false;
        if (col.source == "focus_labor") {
          flag = p.focus_labor;
        } else if (col.source == "focus_inflation") {
          flag = p.focus_inflation;
        } else if (col.source == "focus_banking") {
          flag = p.focus_banking;
        } else if (col.source == "focus_global") {
          flag = p.focus_global;
        } else {
          throw ValidationError("unknown binary feature " + col.source);
        }
        vec.push_back(flag ? 1.0 : 0.0);
        break;
      }
    }
  }
  // Unknown categorical level: the profile's level matched no one-hot column.
  for (const auto& field : kCategoricals) {
    if (column_of(field.name) < 0) {
      // Field was constant in the dataset; a differing level is unknown.
      for (const auto& [source, constant] : constant_levels_) {
        if (source == field.name && field.get(p) != constant) {
          throw ValidationError("unknown " + std::string(field.name) + " level '" +
                                field.get(p) + "'");
        }
      }
      continue;
    }
    bool matched = false;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (columns_[c].kind == FeatureColumn::Kind::one_hot &&
          columns_[c].source == field.name && vec[c] == 1.0) {
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ValidationError("unknown " + std::string(field.name) + " level '" +
                            field.get(p) + "'");
    }
  }
  return vec;
}

int FeatureSchema::column_of(const std::string& source) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].source == source) return static_cast<int>(c);
  }
  return -1;
}

std::string FeatureSchema::decode_categorical(const std::vector<double>& vec,
                                              const std::string& source) const {
  for (const auto& [field, constant] : constant_levels_) {
    if (field == source) return constant;
  }
  double best = -std::numeric_limits<double>::infinity();
  std::string best_level;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].kind != FeatureColumn::Kind::one_hot ||
        columns_[c].source != source) {
      continue;
    }
    if (vec[c] > best) {
      best = vec[c];
      best_level = columns_[c].level;
    }
  }
  if (best_level.empty()) {
    throw ValidationError("no one-hot block for field " + source);
  }
  return best_level;
}

int FeatureSchema::tercile(const std::string& source, double z) const {
  for (const auto& [field, cuts] : tercile_cuts_) {
    if (field == source) {
      if (z <= cuts.first) return 0;
      if (z <= cuts.second) return 1;
      return 2;
    }
  }
  // Field constant in the dataset: everything sits in the middle band.
  return 1;
}

double FeatureSchema::one_hot_mass(const std::vector<double>& vec,
                                   const std::string& source,
                                   const std::string& excluded_level) const {
  double mass = 0.0;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].kind == FeatureColumn::Kind::one_hot &&
        columns_[c].source == source && columns_[c].level != excluded_level) {
      mass += vec[c];
    }
  }
  return mass;
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

namespace {

struct LloydOutcome {
  std::vector<int> assignments;  // over the canonical (sorted) order
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  int iterations = 0;
};

// One seeded k-means++ / Lloyd run over the canonically ordered vectors.
LloydOutcome run_lloyd(const std::vector<const std::vector<double>*>& pts, int k,
                       std::uint64_t seed, int max_iterations, int restart,
                       const KmeansObserver& observer) {
  const std::size_t n = pts.size();
  const std::size_t dim = pts.front()->size();
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(*pts[static_cast<std::size_t>(
      uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1))]);
  std::vector<double> dist2(n, 0.0);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, squared_distance(*pts[i], c));
      dist2[i] = best;
      total += best;
    }
    std::size_t chosen;
    if (total <= 0.0) {
      // All points coincide with existing centroids; any point works.
      chosen = static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
    } else {
      double target = uniform_double(rng) * total;
      double cumulative = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cumulative += dist2[i];
        if (cumulative >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(*pts[chosen]);
  }

  std::vector<int> assignments(n, -1);
  double inertia = 0.0;
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    // Assignment step (ties to the lowest centroid index).
    bool changed = false;
    inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(*pts[i], centroids[0]);
      for (int c = 1; c < k; ++c) {
        double d = squared_distance(*pts[i], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignments[i] != best) {
        assignments[i] = best;
        changed = true;
      }
      inertia += best_d;
    }
    if (observer) observer(restart, iteration, inertia);
    if (!changed && iteration > 0) break;

    // Update step: centroid = mean of its members; empty clusters re-seeded
    // with the point farthest from its centroid (lowest index on ties).
    std::vector<std::vector<double>> sums(
        static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& sum = sums[static_cast<std::size_t>(assignments[i])];
      for (std::size_t d = 0; d < dim; ++d) sum[d] += (*pts[i])[d];
      ++counts[static_cast<std::size_t>(assignments[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        std::size_t farthest = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double d = squared_distance(
              *pts[i], centroids[static_cast<std::size_t>(assignments[i])]);
          if (d > worst) {
            worst = d;
            farthest = i;
          }
        }
        centroids[static_cast<std::size_t>(c)] = *pts[farthest];
      } else {
        for (std::size_t d = 0; d < dim; ++d) {
          centroids[static_cast<std::size_t>(c)][d] =
              sums[static_cast<std::size_t>(c)][d] /
              counts[static_cast<std::size_t>(c)];
        }
      }
    }
  }

  LloydOutcome out;
  out.assignments = std::move(assignments);
  out.centroids = std::move(centroids);
  out.inertia = inertia;
  out.iterations = std::min(iteration + 1, max_iterations);
  return out;
}

}  // namespace

ClusteringResult kmeans(const std::vector<std::vector<double>>& vectors, int k,
                        std::uint64_t seed, int restarts, int max_iterations,
                        const KmeansObserver& observer) {
  if (k < 1) throw ValidationError("kmeans requires k >= 1");
  if (restarts < 1) throw ValidationError("kmeans requires at least one restart");
  if (vectors.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("kmeans infeasible: " + std::to_string(vectors.size()) +
                          " vectors for k=" + std::to_string(k));
  }
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ValidationError("feature vectors differ in length");
    for (double x : v) {
      if (!std::isfinite(x)) throw ValidationError("non-finite feature value");
    }
  }

  // Canonical order: sort indices lexicographically by coordinates so the
  // seeding (and therefore the result) ignores input permutation.
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return vectors[a] < vectors[b];
  });
  std::vector<const std::vector<double>*> pts;
  pts.reserve(vectors.size());
  for (std::size_t idx : order) pts.push_back(&vectors[idx]);

  std::vector<LloydOutcome> outcomes(static_cast<std::size_t>(restarts));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (restarts > 1 && !observer)
#endif
  for (int r = 0; r < restarts; ++r) {
    std::uint64_t restart_seed = fnv1a("restart:" + std::to_string(r), seed);
    outcomes[static_cast<std::size_t>(r)] =
        run_lloyd(pts, k, restart_seed, max_iterations, r, observer);
  }

  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    if (outcomes[static_cast<std::size_t>(r)].inertia <
        outcomes[static_cast<std::size_t>(best)].inertia) {
      best = r;
    }
  }

  const LloydOutcome& win = outcomes[static_cast<std::size_t>(best)];
  ClusteringResult result;
  result.centroids = win.centroids;
  result.inertia = win.inertia;
  result.iterations = win.iterations;
  result.restart_index = best;
  result.assignments.assign(vectors.size(), -1);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    result.assignments[order[pos]] = win.assignments[pos];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Personas
// ---------------------------------------------------------------------------

std::vector<Archetype> assign_archetypes(
    const std::vector<std::vector<double>>& centroids, const FeatureSchema& schema) {
  if (centroids.size() != 3) {
    throw ValidationError("archetype naming expects exactly 3 centroids, got " +
                          std::to_string(centroids.size()));
  }
  std::vector<int> remaining = {0, 1, 2};

  // Highest regional one-hot mass (ignoring the Board level) wins the
  // Regional Pragmatist label; ties fall to the lower cluster index.
  int regional = remaining[0];
  double best_mass = -1.0;
  for (int c : remaining) {
    double mass = schema.one_hot_mass(centroids[static_cast<std::size_t>(c)],
                                      "regional_affiliation", "Board");
    if (mass > best_mass) {
      best_mass = mass;
      regional = c;
    }
  }
  remaining.erase(std::find(remaining.begin(), remaining.end(), regional));

  // Of the rest, the longer-tenured centroid is the Academic Balancer.
  auto tenure_of = [&](int c) {
    int col = schema.column_of("tenure_years");
    return col < 0 ? 0.0 : centroids[static_cast<std::size_t>(c)][static_cast<std::size_t>(col)];
  };
  int academic = tenure_of(remaining[0]) >= tenure_of(remaining[1]) ? remaining[0]
                                                                    : remaining[1];
  int central = academic == remaining[0] ? remaining[1] : remaining[0];

  std::vector<Archetype> labels(3);
  labels[static_cast<std::size_t>(regional)] = Archetype::regional_pragmatist;
  labels[static_cast<std::size_t>(academic)] = Archetype::academic_balancer;
  labels[static_cast<std::size_t>(central)] = Archetype::central_policymaker;
  return labels;
}

Persona materialize_persona(const std::vector<double>& centroid, Archetype label,
                            const FeatureSchema& schema) {
  static const char* kBandNames[] = {"low", "medium", "high"};
  static const char* kTenureBands[] = {"an early-tenure", "a mid-tenure",
                                       "a long-tenured"};

  std::string block = archetype_display_name(label);
  block += ". You are a Federal Open Market Committee member persona.\n";

  int hawk_col = schema.column_of("hawkishness");
  int hawk_band = hawk_col < 0
                      ? 1
                      : schema.tercile("hawkishness",
                                       centroid[static_cast<std::size_t>(hawk_col)]);
  block += "Policy stance: ";
  block += kBandNames[hawk_band];
  block += " hawkishness.\n";

  struct FocusSentence {
    const char* field;
    const char* sentence;
  };
  static const FocusSentence kFocusSentences[] = {
      {"focus_labor", "Places strong emphasis on labor markets.\n"},
      {"focus_inflation", "Prioritizes inflation control.\n"},
      {"focus_banking", "Pays close attention to banking stability.\n"},
      {"focus_global", "Follows global economic trends.\n"},
  };
  for (const auto& fs : kFocusSentences) {
    int col = schema.column_of(fs.field);
    if (col >= 0 && centroid[static_cast<std::size_t>(col)] > 0.5) {
      block += fs.sentence;
    }
  }

  int tenure_col = schema.column_of("tenure_years");
  int tenure_band =
      tenure_col < 0
          ? 1
          : schema.tercile("tenure_years",
                           centroid[static_cast<std::size_t>(tenure_col)]);
  block += "Tenure: ";
  block += kTenureBands[tenure_band];
  block += " committee member.";

  Persona persona;
  persona.archetype = label;
  persona.centroid = centroid;
  persona.prompt_block = block;
  return persona;
}

std::vector<Persona> build_personas(const std::vector<MemberProfile>& members,
                                    std::uint64_t seed,
                                    ClusteringResult* result_out) {
  FeatureSchema schema = FeatureSchema::build(members);
  std::vector<std::vector<double>> vectors;
  vectors.reserve(members.size());
  for (const auto& m : members) vectors.push_back(schema.encode(m));

  ClusteringResult result = kmeans(vectors, 3, seed);
  std::vector<Archetype> labels = assign_archetypes(result.centroids, schema);

  std::vector<Persona> personas;
  for (Archetype want : {Archetype::regional_pragmatist, Archetype::academic_balancer,
                         Archetype::central_policymaker}) {
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (labels[c] == want) {
        personas.push_back(materialize_persona(result.centroids[c], want, schema));
      }
    }
  }
  if (result_out != nullptr) *result_out = std::move(result);
  return personas;
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_flag(const std::string& text, const std::string& where) {
  if (text == "0") return false;
  if (text == "1") return true;
  throw ParseError(where + ": flag must be 0 or 1, got '" + text + "'");
}

double parse_number(const std::string& text, const std::string& where) {
  try {
    std::size_t consumed = 0;
    double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("junk");
    return value;
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + text + "'");
  }
}

}  // namespace

std::vector<MemberProfile> load_members_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open members file " + file.string());
  const std::string origin = file.filename().string();
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  ++line_no;
  static const std::vector<std::string> kHeader = {
      "name",          "hawkishness",     "regional_affiliation",
      "gender",        "political_party", "focus_labor",
      "focus_inflation", "focus_banking", "focus_global",
      "tenure_years"};
  if (split_csv_line(line) != kHeader) {
    throw ParseError(origin + ": unexpected header (want name,hawkishness,...)");
  }
  std::vector<MemberProfile> members;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (fields.size() != kHeader.size()) {
      throw ParseError(where + ": expected " + std::to_string(kHeader.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    MemberProfile m;
    m.name = fields[0];
    m.hawkishness = parse_number(fields[1], where);
    m.regional_affiliation = fields[2];
    m.gender = fields[3];
    m.political_party = fields[4];
    m.focus_labor = parse_flag(fields[5], where);
    m.focus_inflation = parse_flag(fields[6], where);
    m.focus_banking = parse_flag(fields[7], where);
    m.focus_global = parse_flag(fields[8], where);
    m.tenure_years = parse_number(fields[9], where);
    m.validate();
    members.push_back(std::move(m));
  }
  if (members.empty()) throw ParseError(origin + ": no members listed");
  return members;
}

void save_personas_json(const std::filesystem::path& file,
                        const std::vector<Persona>& personas,
                        const std::vector<std::string>& feature_names) {
  json doc;
  doc["schema_version"] = 1;
  doc["feature_names"] = feature_names;
  json list = json::array();
  for (const auto& p : personas) {
    json entry;
    entry["archetype"] = archetype_id(p.archetype);
    entry["centroid"] = p.centroid;
    entry["prompt_block"] = p.prompt_block;
    list.push_back(entry);
  }
  doc["personas"] = list;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << doc.dump(2) << '\n';
}

std::vector<Persona> load_personas_json(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open personas file " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(file.filename().string() + ": invalid JSON at byte " +
                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.contains("personas") || !doc["personas"].is_array()) {
    throw ParseError(file.filename().string() + ": missing 'personas' array");
  }
  std::vector<Persona> personas;
  for (const auto& entry : doc["personas"]) {
    Persona p;
    auto label = archetype_from_id(entry.value("archetype", ""));
    if (!label) {
      throw ParseError(file.filename().string() + ": unknown archetype '" +
                       entry.value("archetype", "") + "'");
    }
    p.archetype = *label;
    p.centroid = entry.value("centroid", std::vector<double>{});
    p.prompt_block = entry.value("prompt_block", "");
    if (p.prompt_block.empty()) {
      throw ParseError(file.filename().string() + ": persona with empty prompt_block");
    }
    personas.push_back(std::move(p));
  }
  if (personas.size() != 3) {
    throw ValidationError("personas file must contain exactly 3 personas, got " +
                          std::to_string(personas.size()));
  }
  return personas;
}

}  // namespace fedsight::personas
