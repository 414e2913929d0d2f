#include "moran/cylinder_classes.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

// Log values are bucketed on this grid when merging; values that differ only
// by summation-order rounding land in one bucket (a split bucket costs speed,
// never correctness).
constexpr double kMergeScale = 1e9;

using ClassKey = std::tuple<std::size_t, std::int64_t, std::int64_t>;

ClassKey key_of(const CylinderClass& c) {
  const std::int64_t mass = c.log_mass == numeric::kNegInf ? std::numeric_limits<std::int64_t>::min()
                                                           : std::llround(c.log_mass * kMergeScale);
  return {c.length, std::llround(c.log_diameter * kMergeScale), mass};
}

void merge_into(std::vector<CylinderClass>& classes) {
  std::map<ClassKey, std::size_t> index;
  std::vector<CylinderClass> merged;
  merged.reserve(classes.size());
  for (auto& c : classes) {
    auto [it, inserted] = index.try_emplace(key_of(c), merged.size());
    if (inserted) {
      merged.push_back(std::move(c));
    } else {
      auto& target = merged[it->second];
      target.log_multiplicity = numeric::log_add(target.log_multiplicity, c.log_multiplicity);
    }
  }
  classes = std::move(merged);
}

}  // namespace

AntichainRefiner::AntichainRefiner(const ConstructionSpec& spec, const MoranMeasure* measure, Word start,
                                   std::function<double(const Word&)> log_diameter, std::uint64_t class_cap)
    : spec_(&spec),
      measure_(measure),
      log_diameter_(std::move(log_diameter)),
      class_cap_(class_cap),
      last_threshold_(std::numeric_limits<double>::infinity()) {
  merge_ = !spec.word_dependent() && (measure == nullptr || measure->level_indexed()) && !log_diameter_;
  CylinderClass root;
  root.length = start.length();
  root.log_diameter = log_diameter_ ? log_diameter_(start) : cylinder_log_diameter(spec, start);
  root.log_mass = measure ? cylinder_log_mass(*measure, start) : 0.0;
  if (!merge_) root.representative = std::move(start);
  frontier_.push_back(std::move(root));
}

const AntichainRefiner::LevelData& AntichainRefiner::level_data(std::size_t k) {
  auto it = levels_.find(k);
  if (it != levels_.end()) return it->second;
  LevelData data;
  const Level level = spec_->level(k);
  data.log_ratios = spec_->log_ratios(k);
  if (measure_) {
    for (double p : measure_->level_weights(k)) data.log_weights.push_back(p == 0.0 ? numeric::kNegInf : std::log(p));
  } else {
    data.log_weights.assign(level.branching, 0.0);
  }
  return levels_.emplace(k, std::move(data)).first->second;
}

void AntichainRefiner::expand(const CylinderClass& cls, std::vector<CylinderClass>& out) {
  const std::size_t k = cls.length + 1;
  if (merge_) {
    const auto& data = level_data(k);
    for (std::size_t i = 0; i < data.log_ratios.size(); ++i) {
      CylinderClass child;
      child.length = k;
      child.log_diameter = cls.log_diameter + data.log_ratios[i];
      child.log_mass = cls.log_mass + data.log_weights[i];
      child.log_multiplicity = cls.log_multiplicity;
      out.push_back(std::move(child));
    }
    return;
  }
  const auto n = spec_->branching(k);
  std::vector<double> weights;
  if (measure_) weights = measure_->offspring_weights(cls.representative, cls.log_mass != numeric::kNegInf);
  for (Word::Index i = 1; i <= n; ++i) {
    CylinderClass child;
    child.length = k;
    child.representative = cls.representative.child(i);
    child.log_diameter = log_diameter_ ? log_diameter_(child.representative)
                                       : cls.log_diameter + spec_->realized_log_ratio(child.representative);
    const double p = measure_ ? weights[i - 1] : 1.0;
    child.log_mass = p == 0.0 ? numeric::kNegInf : cls.log_mass + std::log(p);
    child.log_multiplicity = cls.log_multiplicity;
    out.push_back(std::move(child));
  }
}

const std::vector<CylinderClass>& AntichainRefiner::refine(double log_threshold) {
  if (log_threshold > last_threshold_) {
    throw InvalidArgument("AntichainRefiner: thresholds must not increase");
  }
  last_threshold_ = log_threshold;
  std::vector<CylinderClass> done;
  std::vector<CylinderClass> pending = std::move(frontier_);
  while (!pending.empty()) {
    std::vector<CylinderClass> next;
    for (const auto& cls : pending) {
      if (cls.log_diameter <= log_threshold) {
        done.push_back(cls);
      } else {
        expand(cls, next);
      }
    }
    if (merge_) merge_into(next);
    if (done.size() + next.size() > class_cap_) {
      throw InvalidArgument(fmt::format("antichain refinement exceeds {} cylinder classes", class_cap_));
    }
    pending = std::move(next);
  }
  if (merge_) merge_into(done);
  frontier_ = std::move(done);
  return frontier_;
}

double AntichainRefiner::log_moment(double q) const {
  std::vector<double> terms;
  terms.reserve(frontier_.size());
  for (const auto& c : frontier_) {
    if (c.log_mass == numeric::kNegInf) continue;
    terms.push_back(c.log_multiplicity + q * c.log_mass);
  }
  return numeric::log_sum_exp(terms);
}

double AntichainRefiner::log_count() const {
  std::vector<double> terms;
  terms.reserve(frontier_.size());
  for (const auto& c : frontier_) terms.push_back(c.log_multiplicity);
  return numeric::log_sum_exp(terms);
}

}  // namespace moran
