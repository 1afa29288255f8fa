#include "evkit/mixer.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "csv.hpp"
#include "evkit/error.hpp"

namespace evkit {

namespace {

constexpr const char* kModule = "mixer";

bool slice_less(const Instance& a, const Instance& b) {
  return a.sequence_id != b.sequence_id ? a.sequence_id < b.sequence_id
                                        : a.offset_us < b.offset_us;
}

Timestamp total_length(std::span<const Instance> xs) {
  Timestamp sum = 0;
  for (const auto& x : xs) sum += x.length_us;
  return sum;
}

std::string seconds(Timestamp us) {
  std::string s;
  detail::append_double(s, static_cast<double>(us) / 1e6);
  return s + " s";
}

/// Takes `need` microseconds from the front of `pool` starting at `cursor`.
std::vector<Instance> carve(std::span<const Instance> pool, std::size_t& cursor,
                            Timestamp& used_in_current, Timestamp need) {
  std::vector<Instance> out;
  while (need > 0 && cursor < pool.size()) {
    const Instance& src = pool[cursor];
    const Timestamp available = src.length_us - used_in_current;
    const Timestamp take = std::min(available, need);
    out.push_back(Instance{src.sequence_id, src.offset_us + used_in_current, take});
    need -= take;
    used_in_current += take;
    if (used_in_current == src.length_us) {
      ++cursor;
      used_in_current = 0;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Domain d) noexcept { return d == Domain::real ? "real" : "synthetic"; }
std::string_view to_string(Condition c) noexcept { return c == Condition::day ? "day" : "night"; }

Segmentation segment_instances(const SequenceEntry& seq, std::int64_t ticks,
                               Timestamp tick_period_us) {
  if (ticks <= 0 || tick_period_us <= 0) {
    throw Error(ErrorKind::invalid_argument, kModule, "ticks and tick period must be positive");
  }
  const Timestamp length = ticks * tick_period_us;
  Segmentation out;
  const Timestamp n = seq.duration_us > 0 ? seq.duration_us / length : 0;
  for (Timestamp i = 0; i < n; ++i) out.instances.push_back(Instance{seq.id, i * length, length});
  out.remainder_us = std::max<Timestamp>(seq.duration_us, 0) - n * length;
  return out;
}

Timestamp Group::duration_us() const noexcept { return total_length(instances); }

Grouping build_groups(std::vector<Instance> instances, std::size_t per_group) {
  if (per_group == 0) throw Error(ErrorKind::invalid_argument, kModule, "per_group must be >= 1");
  std::sort(instances.begin(), instances.end(), slice_less);
  Grouping out;
  const std::size_t full = instances.size() / per_group;
  for (std::size_t g = 0; g < full; ++g) {
    Group group;
    group.instances.assign(instances.begin() + static_cast<std::ptrdiff_t>(g * per_group),
                           instances.begin() + static_cast<std::ptrdiff_t>((g + 1) * per_group));
    out.groups.push_back(std::move(group));
  }
  out.leftovers.assign(instances.begin() + static_cast<std::ptrdiff_t>(full * per_group),
                       instances.end());
  return out;
}

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) {
    throw Error(ErrorKind::invalid_argument, kModule, "fraction needs num >= 0 and den > 0");
  }
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

std::string Fraction::str() const { return std::to_string(num) + "/" + std::to_string(den); }

MixPlan compose_mix(std::span<const Group> real_groups, std::span<const Group> synthetic_groups,
                    int k, int total_groups) {
  if (total_groups < 1) throw Error(ErrorKind::invalid_argument, kModule, "total_groups < 1");
  if (k < 0 || k > total_groups) {
    throw Error(ErrorKind::invalid_argument, kModule,
                "k must be in [0, " + std::to_string(total_groups) + "], got " +
                    std::to_string(k));
  }
  const auto need_real = static_cast<std::size_t>(k);
  const auto need_synthetic = static_cast<std::size_t>(total_groups - k);
  std::string shortfall;
  if (real_groups.size() < need_real) {
    shortfall += "real groups: need " + std::to_string(need_real) + ", have " +
                 std::to_string(real_groups.size()) + " (short " +
                 std::to_string(need_real - real_groups.size()) + ")";
  }
  if (synthetic_groups.size() < need_synthetic) {
    if (!shortfall.empty()) shortfall += "; ";
    shortfall += "synthetic groups: need " + std::to_string(need_synthetic) + ", have " +
                 std::to_string(synthetic_groups.size()) + " (short " +
                 std::to_string(need_synthetic - synthetic_groups.size()) + ")";
  }
  if (!shortfall.empty()) throw Error(ErrorKind::capacity, kModule, shortfall);

  MixPlan plan;
  plan.k = k;
  plan.total_groups = total_groups;
  plan.real_groups.assign(real_groups.begin(), real_groups.begin() + k);
  plan.synthetic_groups.assign(synthetic_groups.begin(),
                               synthetic_groups.begin() + (total_groups - k));
  for (const auto& g : plan.real_groups) plan.real_total_us += g.duration_us();
  for (const auto& g : plan.synthetic_groups) plan.synthetic_total_us += g.duration_us();
  if (plan.total_us() <= 0) throw Error(ErrorKind::capacity, kModule, "mix has zero duration");
  plan.fraction_real = Fraction::of(plan.real_total_us, plan.total_us());
  return plan;
}

MixReport report(const MixPlan& plan) {
  MixReport r;
  r.real_seconds = static_cast<double>(plan.real_total_us) / 1e6;
  r.synthetic_seconds = static_cast<double>(plan.synthetic_total_us) / 1e6;
  r.total_seconds = static_cast<double>(plan.total_us()) / 1e6;
  r.real_percent = 100.0 * plan.fraction_real.value();
  r.synthetic_percent = 100.0 - r.real_percent;
  return r;
}

EvalSplit fixed_eval_split(std::span<const Instance> real_pool,
                           std::span<const Instance> synthetic_pool,
                           const SplitRequirement& requirement) {
  const Timestamp need_real = requirement.validation_real_us + requirement.test_real_us;
  const Timestamp need_synthetic =
      requirement.validation_synthetic_us + requirement.test_synthetic_us;
  const Timestamp have_real = total_length(real_pool);
  const Timestamp have_synthetic = total_length(synthetic_pool);
  std::string shortfall;
  if (have_real < need_real) {
    shortfall += "real pool: need " + seconds(need_real) + ", have " + seconds(have_real);
  }
  if (have_synthetic < need_synthetic) {
    if (!shortfall.empty()) shortfall += "; ";
    shortfall += "synthetic pool: need " + seconds(need_synthetic) + ", have " +
                 seconds(have_synthetic);
  }
  if (!shortfall.empty()) throw Error(ErrorKind::capacity, kModule, shortfall);

  std::size_t real_cursor = 0, synthetic_cursor = 0;
  Timestamp real_used = 0, synthetic_used = 0;
  auto make = [&](Timestamp real_us, Timestamp synthetic_us) {
    SplitPlan plan;
    plan.real = carve(real_pool, real_cursor, real_used, real_us);
    plan.synthetic = carve(synthetic_pool, synthetic_cursor, synthetic_used, synthetic_us);
    plan.real_total_us = total_length(plan.real);
    plan.synthetic_total_us = total_length(plan.synthetic);
    const Timestamp total = plan.real_total_us + plan.synthetic_total_us;
    plan.fraction_real = total > 0 ? Fraction::of(plan.real_total_us, total) : Fraction{};
    return plan;
  };
  EvalSplit split;
  split.validation = make(requirement.validation_real_us, requirement.validation_synthetic_us);
  split.test = make(requirement.test_real_us, requirement.test_synthetic_us);
  return split;
}

bool disjoint(std::span<const Instance> slices) {
  std::vector<Instance> sorted(slices.begin(), slices.end());
  std::sort(sorted.begin(), sorted.end(), slice_less);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& a = sorted[i - 1];
    const auto& b = sorted[i];
    if (a.sequence_id == b.sequence_id && b.offset_us < a.offset_us + a.length_us) return false;
  }
  return true;
}

DomainPool build_pool(std::span<const SequenceEntry> manifest, Domain domain,
                      const PoolConfig& config) {
  std::vector<const SequenceEntry*> entries;
  for (const auto& e : manifest) {
    if (e.domain == domain) entries.push_back(&e);
  }
  std::sort(entries.begin(), entries.end(),
            [](const SequenceEntry* a, const SequenceEntry* b) { return a->id < b->id; });
  std::vector<Instance> instances;
  DomainPool pool;
  for (const SequenceEntry* e : entries) {
    Segmentation s = segment_instances(*e, config.ticks, config.tick_period_us);
    const Timestamp used = e->duration_us - s.remainder_us;
    if (s.remainder_us > 0) pool.remainders.push_back(Instance{e->id, used, s.remainder_us});
    instances.insert(instances.end(), s.instances.begin(), s.instances.end());
  }
  pool.grouping = build_groups(std::move(instances), config.per_group);
  return pool;
}

std::vector<Instance> unreserved(const DomainPool& pool, std::size_t reserved_groups) {
  std::vector<Instance> out;
  const auto& groups = pool.grouping.groups;
  for (std::size_t g = std::min(reserved_groups, groups.size()); g < groups.size(); ++g) {
    out.insert(out.end(), groups[g].instances.begin(), groups[g].instances.end());
  }
  out.insert(out.end(), pool.grouping.leftovers.begin(), pool.grouping.leftovers.end());
  out.insert(out.end(), pool.remainders.begin(), pool.remainders.end());
  std::sort(out.begin(), out.end(), slice_less);
  return out;
}

std::vector<SequenceEntry> read_manifest(std::istream& in) {
  detail::LineReader reader(in, kModule);
  std::string_view line;
  if (!reader.next(line) || line != manifest_header) {
    detail::row_error(ErrorKind::unparsable, kModule, 1,
                      std::string("expected header '") + manifest_header + "'");
  }
  std::vector<SequenceEntry> entries;
  std::set<std::string, std::less<>> seen;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const std::size_t row = reader.row();
    auto f = detail::split_fields(line);
    if (f.size() != 5) {
      detail::row_error(ErrorKind::column_count, kModule, row,
                        "expected 5 fields, got " + std::to_string(f.size()));
    }
    SequenceEntry e;
    e.id = std::string(f[0]);
    if (e.id.empty()) detail::row_error(ErrorKind::field_range, kModule, row, "empty id");
    if (!seen.insert(e.id).second) {
      detail::row_error(ErrorKind::field_range, kModule, row, "duplicate id '" + e.id + "'");
    }
    if (f[1] == "real") {
      e.domain = Domain::real;
    } else if (f[1] == "synthetic") {
      e.domain = Domain::synthetic;
    } else {
      detail::row_error(ErrorKind::field_range, kModule, row,
                        "domain must be real or synthetic");
    }
    if (f[2] == "day") {
      e.condition = Condition::day;
    } else if (f[2] == "night") {
      e.condition = Condition::night;
    } else {
      detail::row_error(ErrorKind::field_range, kModule, row, "condition must be day or night");
    }
    e.duration_us = detail::parse_int<Timestamp>(f[3], kModule, row, "duration_us");
    if (e.duration_us <= 0) {
      detail::row_error(ErrorKind::field_range, kModule, row, "duration_us must be > 0");
    }
    e.source_path = std::string(f[4]);
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace evkit
