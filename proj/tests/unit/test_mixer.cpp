#include <sstream>
#include <string>

#include "check.hpp"
#include "doctest.h"
#include "evkit/mixer.hpp"

using namespace evkit;

namespace {

constexpr Timestamp kInstance = 83'250'000;
constexpr Timestamp kGroup = 333'000'000;

SequenceEntry seq(const std::string& id, Domain d, Timestamp duration) {
  return SequenceEntry{id, d, Condition::day, duration, id + ".evb"};
}

std::vector<Group> groups_of(Domain d, int n, const std::string& prefix) {
  std::vector<SequenceEntry> m;
  for (int i = 0; i < n; ++i) m.push_back(seq(prefix + std::to_string(10 + i), d, kGroup));
  return build_pool(m, d).grouping.groups;
}

}  // namespace

TEST_CASE("segment_instances examples") {
  const auto one = segment_instances(seq("a", Domain::real, kInstance));
  REQUIRE(one.instances.size() == 1);
  CHECK(one.instances[0].length_us == 83'250'000);
  CHECK(one.remainder_us == 0);

  const auto short_seq = segment_instances(seq("b", Domain::real, 1'000'000));
  CHECK(short_seq.instances.empty());
  CHECK(short_seq.remainder_us == 1'000'000);

  const auto two = segment_instances(seq("c", Domain::real, 5000 * 33300 + 17));
  REQUIRE(two.instances.size() == 2);
  CHECK(two.instances[1].offset_us == kInstance);
  CHECK(two.remainder_us == 17);

  CHECK_THROWS_KIND(segment_instances(seq("d", Domain::real, 10), 0), ErrorKind::invalid_argument);
}

TEST_CASE("build_groups examples") {
  auto instances = [](int n) {
    std::vector<Instance> v;
    for (int i = 0; i < n; ++i) v.push_back({"s", i * kInstance, kInstance});
    return v;
  };
  const auto four = build_groups(instances(4));
  REQUIRE(four.groups.size() == 1);
  CHECK(four.groups[0].duration_us() == 333'000'000);

  const auto three = build_groups(instances(3));
  CHECK(three.groups.empty());
  CHECK(three.leftovers.size() == 3);

  const auto nine = build_groups(instances(9));
  CHECK(nine.groups.size() == 2);
  CHECK(nine.leftovers.size() == 1);

  CHECK_THROWS_KIND(build_groups(instances(2), 0), ErrorKind::invalid_argument);
}

TEST_CASE("groups are assembled in (sequence id, offset) order") {
  std::vector<Instance> v{{"b", 0, 1}, {"a", 5, 1}, {"a", 0, 1}, {"c", 0, 1}};
  const auto g = build_groups(v, 2);
  REQUIRE(g.groups.size() == 2);
  CHECK(g.groups[0].instances[0] == Instance{"a", 0, 1});
  CHECK(g.groups[0].instances[1] == Instance{"a", 5, 1});
  CHECK(g.groups[1].instances[0].sequence_id == "b");
}

TEST_CASE("fractions reduce to lowest terms") {
  CHECK(Fraction::of(999, 2331) == Fraction{3, 7});
  CHECK(Fraction::of(0, 5) == Fraction{0, 1});
  CHECK(Fraction::of(360, 680).str() == "9/17");
  CHECK_THROWS_KIND(Fraction::of(1, 0), ErrorKind::invalid_argument);
}

TEST_CASE("compose_mix examples") {
  const auto real = groups_of(Domain::real, 7, "r");
  const auto synthetic = groups_of(Domain::synthetic, 7, "s");
  REQUIRE(real.size() == 7);

  SUBCASE("k = 3") {
    const auto plan = compose_mix(real, synthetic, 3);
    CHECK(plan.real_total_us == 999'000'000);
    CHECK(plan.synthetic_total_us == 1'332'000'000);
    CHECK(plan.fraction_real == Fraction{3, 7});
    CHECK(plan.fraction_real.value() == doctest::Approx(0.4286).epsilon(1e-4));
  }
  SUBCASE("k = 1") {
    const auto r = report(compose_mix(real, synthetic, 1));
    CHECK(r.real_seconds == 333.0);
    CHECK(r.synthetic_seconds == 1998.0);
    CHECK(r.total_seconds == 2331.0);
    CHECK(r.real_percent == doctest::Approx(100.0 / 7.0));
  }
  SUBCASE("k = 0") {
    const auto plan = compose_mix(real, synthetic, 0);
    CHECK(plan.real_groups.empty());
    CHECK(plan.fraction_real == Fraction{0, 1});
  }
  SUBCASE("fraction is k/7, increasing, with constant total") {
    Fraction previous{-1, 1};
    for (int k = 0; k <= 7; ++k) {
      const auto plan = compose_mix(real, synthetic, k);
      CHECK(plan.fraction_real == Fraction::of(k, 7));
      CHECK(plan.total_us() == 2'331'000'000);
      CHECK(plan.fraction_real.value() > previous.value());
      previous = plan.fraction_real;
    }
  }
  SUBCASE("capacity shortfall is named") {
    const std::span<const Group> few(real.data(), 2);
    try {
      compose_mix(few, synthetic, 5);
      FAIL("expected a capacity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::capacity);
      CHECK(e.detail().find("short 3") != std::string::npos);
    }
    CHECK_THROWS_KIND(compose_mix(real, synthetic, 8), ErrorKind::invalid_argument);
  }
}

TEST_CASE("fixed_eval_split") {
  std::vector<SequenceEntry> m;
  for (int i = 0; i < 3; ++i) m.push_back(seq("r" + std::to_string(i), Domain::real, kGroup));
  for (int i = 0; i < 3; ++i) m.push_back(seq("s" + std::to_string(i), Domain::synthetic, kGroup));
  const auto real = unreserved(build_pool(m, Domain::real), 0);
  const auto synthetic = unreserved(build_pool(m, Domain::synthetic), 0);

  const auto split = fixed_eval_split(real, synthetic);
  CHECK(split.validation.real_total_us == 360'000'000);
  CHECK(split.validation.synthetic_total_us == 320'000'000);
  CHECK(split.test.real_total_us == 180'000'000);
  CHECK(split.test.synthetic_total_us == 160'000'000);
  CHECK(split.validation.fraction_real == Fraction{9, 17});
  CHECK(split.test.fraction_real == Fraction{9, 17});
  CHECK(split.validation.fraction_real.value() == doctest::Approx(0.529).epsilon(1e-3));

  std::vector<Instance> all = split.validation.real;
  for (const auto* part : {&split.validation.synthetic, &split.test.real, &split.test.synthetic}) {
    all.insert(all.end(), part->begin(), part->end());
  }
  CHECK(disjoint(all));

  CHECK_THROWS_KIND(fixed_eval_split({}, {}), ErrorKind::capacity);
}

TEST_CASE("disjointness check") {
  CHECK(disjoint(std::vector<Instance>{{"a", 0, 10}, {"a", 10, 5}, {"b", 0, 10}}));
  CHECK_FALSE(disjoint(std::vector<Instance>{{"a", 0, 10}, {"a", 9, 5}}));
  CHECK_FALSE(disjoint(std::vector<Instance>{{"a", 20, 10}, {"a", 0, 100}}));
}

TEST_CASE("reserved groups stay out of the evaluation pool") {
  std::vector<SequenceEntry> m;
  for (int i = 0; i < 10; ++i) m.push_back(seq("r" + std::to_string(i), Domain::real, kGroup + 5));
  const auto pool = build_pool(m, Domain::real);
  CHECK(pool.grouping.groups.size() == 10);
  CHECK(pool.remainders.size() == 10);
  const auto rest = unreserved(pool, 7);
  CHECK(rest.size() == 3 * 4 + 10);
  std::vector<Instance> all = rest;
  for (int g = 0; g < 7; ++g) {
    all.insert(all.end(), pool.grouping.groups[g].instances.begin(),
               pool.grouping.groups[g].instances.end());
  }
  CHECK(disjoint(all));
}

TEST_CASE("manifest parsing") {
  std::istringstream ok(std::string(manifest_header) +
                        "\nseq1,real,day,333000000,a/b.evb\nseq2,synthetic,night,5,c.evb\n");
  const auto m = read_manifest(ok);
  REQUIRE(m.size() == 2);
  CHECK(m[1].domain == Domain::synthetic);
  CHECK(m[1].condition == Condition::night);
  CHECK(m[0].source_path == "a/b.evb");

  auto fails = [](const std::string& body, ErrorKind kind) {
    std::istringstream in(std::string(manifest_header) + "\n" + body);
    CHECK_THROWS_KIND(read_manifest(in), kind);
  };
  fails("a,real,day,0,x\n", ErrorKind::field_range);
  fails("a,moon,day,5,x\n", ErrorKind::field_range);
  fails("a,real,dusk,5,x\n", ErrorKind::field_range);
  fails("a,real,day,5\n", ErrorKind::column_count);
  fails("a,real,day,5,x\na,real,day,5,y\n", ErrorKind::field_range);
  fails("a,real,day,five,x\n", ErrorKind::unparsable);
}
