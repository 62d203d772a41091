#include <array>

#include "doctest.h"
#include "lipgan/curriculum.hpp"
#include "lipgan/errors.hpp"

using namespace lipgan;

TEST_SUITE("curriculum") {
  TEST_CASE("advance only at multiples of iterations_per_stage") {
    CurriculumSchedule s;
    s.iterations_per_stage = 100;
    s.teacher_ratio_start = 0.8;
    s.teacher_decay = 0.5;
    const Stage start = initial_stage(s);
    CHECK(advance(start, 99, s) == start);
    CHECK(advance(start, 0, s) == start);
    const Stage next = advance(start, 100, s);
    CHECK(next.current_max == 2);
    CHECK(next.teacher_ratio == 0.4);
    CHECK(advance(next, 150, s) == next);
  }

  TEST_CASE("current_max is capped at max_length") {
    CurriculumSchedule s;
    s.iterations_per_stage = 1;
    Stage st{25, 0.0};
    CHECK(advance(st, 7, s).current_max == 25);
  }

  TEST_CASE("zero decay switches teacher helping off after the first stage") {
    CurriculumSchedule s;
    s.iterations_per_stage = 10;
    s.teacher_ratio_start = 1.0;
    s.teacher_decay = 0.0;
    Stage st = initial_stage(s);
    CHECK(st.teacher_ratio == 1.0);
    for (std::uint64_t it = 1; it <= 50; ++it) {
      st = advance(st, it, s);
      if (it >= 10) CHECK(st.teacher_ratio == 0.0);
    }
  }

  TEST_CASE("stage trajectory is monotone and bounded") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      CurriculumSchedule s;
      s.max_length = rng.uniform_int(1, 30);
      s.start_length = rng.uniform_int(1, s.max_length);
      s.iterations_per_stage = rng.uniform_int(1, 20);
      s.teacher_ratio_start = rng.uniform();
      s.teacher_decay = rng.uniform();
      s.validate();
      Stage st = initial_stage(s);
      for (std::uint64_t it = 1; it <= 500; ++it) {
        const Stage next = advance(st, it, s);
        CHECK(next.current_max >= st.current_max);
        CHECK(next.current_max <= s.max_length);
        CHECK(next.teacher_ratio >= 0.0);
        CHECK(next.teacher_ratio <= st.teacher_ratio);
        st = next;
      }
    }
  }

  TEST_CASE("sample_length") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(sample_length({1, 0.0}, true, rng) == 1);
    for (int i = 0; i < 100; ++i) CHECK(sample_length({7, 0.0}, false, rng) == 7);
    std::array<int, 5> counts{};
    constexpr int kDraws = 100000;
    for (int i = 0; i < kDraws; ++i) {
      const auto len = sample_length({4, 0.0}, true, rng);
      REQUIRE(len >= 1);
      REQUIRE(len <= 4);
      ++counts[len];
    }
    for (std::size_t len = 1; len <= 4; ++len) {
      const double freq = static_cast<double>(counts[len]) / kDraws;
      CHECK(freq >= 0.24);
      CHECK(freq <= 0.26);
    }
  }

  TEST_CASE("teacher_prefix") {
    Rng rng(2);
    const Sentence real{3, 4, 5, 6, 7, 2};
    for (int i = 0; i < 100; ++i) CHECK_FALSE(teacher_prefix(real, 5, {5, 0.0}, rng).has_value());
    for (int i = 0; i < 20; ++i) {
      const auto p = teacher_prefix(real, 5, {5, 1.0}, rng);
      REQUIRE(p.has_value());
      CHECK(*p == Sentence{3, 4, 5, 6, 7});
    }
    int fired = 0;
    for (int i = 0; i < 10000; ++i) {
      if (const auto p = teacher_prefix(real, 4, {4, 0.5}, rng)) {
        CHECK(p->size() == 2);
        ++fired;
      }
    }
    CHECK(fired > 4800);
    CHECK(fired < 5200);
    CHECK_THROWS_AS(teacher_prefix(Sentence{3, 2}, 4, {4, 0.5}, rng), Error);
  }

  TEST_CASE("prefix length never exceeds the sequence length") {
    Rng rng(3);
    const Sentence real{3, 3, 3, 3, 3, 3, 3, 3, 3, 3};
    for (int i = 0; i < 2000; ++i) {
      const std::size_t len = rng.uniform_int(1, 10);
      const Stage st{len, rng.uniform()};
      if (const auto p = teacher_prefix(real, len, st, rng)) {
        CHECK(p->size() >= 1);
        CHECK(p->size() <= len);
      }
    }
  }

  TEST_CASE("identical seeds give identical draws") {
    Rng a(11), b(11);
    const Stage st{6, 0.3};
    const Sentence real{3, 4, 5, 6, 7, 8, 2};
    for (int i = 0; i < 200; ++i) {
      CHECK(sample_length(st, true, a) == sample_length(st, true, b));
      CHECK(teacher_prefix(real, 6, st, a) == teacher_prefix(real, 6, st, b));
    }
  }

  TEST_CASE("schedule validation") {
    CurriculumSchedule s;
    s.max_length = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.start_length = 30;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.teacher_ratio_start = 1.5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.iterations_per_stage = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
  }
}
