#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evkit/types.hpp"

namespace evkit {

enum class Domain { real, synthetic };
enum class Condition { day, night };

std::string_view to_string(Domain d) noexcept;
std::string_view to_string(Condition c) noexcept;

struct SequenceEntry {
  std::string id;
  Domain domain = Domain::real;
  Condition condition = Condition::day;
  Timestamp duration_us = 0;
  std::string source_path;
};

/// A contiguous slice [offset_us, offset_us + length_us) of one sequence.
struct Instance {
  std::string sequence_id;
  Timestamp offset_us = 0;
  Timestamp length_us = 0;

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline constexpr std::int64_t default_instance_ticks = 2500;
inline constexpr Timestamp default_tick_period_us = 33300;
inline constexpr std::size_t default_instances_per_group = 4;
inline constexpr int default_mix_groups = 7;

struct Segmentation {
  std::vector<Instance> instances;
  Timestamp remainder_us = 0;
};

/// Cuts back-to-back instances of ticks * tick_period_us from the start of
/// the sequence.
Segmentation segment_instances(const SequenceEntry& seq,
                               std::int64_t ticks = default_instance_ticks,
                               Timestamp tick_period_us = default_tick_period_us);

struct Group {
  std::vector<Instance> instances;
  Timestamp duration_us() const noexcept;
};

struct Grouping {
  std::vector<Group> groups;
  std::vector<Instance> leftovers;
};

/// Sorts instances by (sequence id, offset) and bundles consecutive runs of
/// `per_group`.
Grouping build_groups(std::vector<Instance> instances,
                      std::size_t per_group = default_instances_per_group);

/// Exact non-negative rational, kept in lowest terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction of(std::int64_t num, std::int64_t den);
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct MixPlan {
  int k = 0;
  int total_groups = default_mix_groups;
  std::vector<Group> real_groups;
  std::vector<Group> synthetic_groups;
  Timestamp real_total_us = 0;
  Timestamp synthetic_total_us = 0;
  Fraction fraction_real;

  Timestamp total_us() const noexcept { return real_total_us + synthetic_total_us; }
};

struct MixReport {
  double real_seconds = 0.0;
  double synthetic_seconds = 0.0;
  double total_seconds = 0.0;
  double real_percent = 0.0;
  double synthetic_percent = 0.0;
};

/// Takes the first k real groups and the first (total_groups - k) synthetic
/// groups. Throws capacity when either side is short.
MixPlan compose_mix(std::span<const Group> real_groups, std::span<const Group> synthetic_groups,
                    int k, int total_groups = default_mix_groups);

MixReport report(const MixPlan& plan);

struct SplitRequirement {
  Timestamp validation_real_us = 360'000'000;
  Timestamp validation_synthetic_us = 320'000'000;
  Timestamp test_real_us = 180'000'000;
  Timestamp test_synthetic_us = 160'000'000;
};

struct SplitPlan {
  std::vector<Instance> real;
  std::vector<Instance> synthetic;
  Timestamp real_total_us = 0;
  Timestamp synthetic_total_us = 0;
  Fraction fraction_real;
};

struct EvalSplit {
  SplitPlan validation;
  SplitPlan test;
};

/// Carves the validation plan, then the test plan, from the front of each
/// pool, splitting pool slices where needed. Throws capacity on shortfall.
EvalSplit fixed_eval_split(std::span<const Instance> real_pool,
                           std::span<const Instance> synthetic_pool,
                           const SplitRequirement& requirement = {});

/// True when no two slices of the same sequence overlap.
bool disjoint(std::span<const Instance> slices);

struct DomainPool {
  Grouping grouping;
  /// Tail of each sequence shorter than one instance.
  std::vector<Instance> remainders;
};

struct PoolConfig {
  std::int64_t ticks = default_instance_ticks;
  Timestamp tick_period_us = default_tick_period_us;
  std::size_t per_group = default_instances_per_group;
};

/// Segments and groups every manifest entry of one domain.
DomainPool build_pool(std::span<const SequenceEntry> manifest, Domain domain,
                      const PoolConfig& config = {});

/// Everything in `pool` not used by its first `reserved_groups` groups,
/// sorted by (sequence id, offset).
std::vector<Instance> unreserved(const DomainPool& pool, std::size_t reserved_groups);

/// Manifest CSV: id,domain,condition,duration_us,path
inline constexpr const char* manifest_header = "id,domain,condition,duration_us,path";
std::vector<SequenceEntry> read_manifest(std::istream& in);

}  // namespace evkit
