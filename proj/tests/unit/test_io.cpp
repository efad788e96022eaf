#include "distillq/circuit.hpp"
#include "distillq/error.hpp"
#include "distillq/io.hpp"
#include "distillq/rational.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace distillq;
using io::json;

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(Rational::parse("16/63"), Rational(16, 63));
  EXPECT_EQ(Rational::parse("2/8").to_string(), "1/4");
  EXPECT_EQ(Rational::parse("0.25"), Rational(1, 4));
  EXPECT_EQ(Rational::parse("1"), Rational(1, 1));
  EXPECT_EQ(Rational(-2, -4), Rational(1, 2));
  EXPECT_LT(Rational(1, 4), Rational(16, 63));
  EXPECT_NEAR(Rational(16, 63).to_double(), 0.253968, 1e-6);
  EXPECT_THROW((void)Rational::parse("1/0"), InvalidConfig);
  EXPECT_THROW((void)Rational::parse("abc"), InvalidConfig);
  EXPECT_THROW((void)Rational(1, 0), InvalidConfig);
}

TEST(Format, Fixed) {
  EXPECT_EQ(io::fixed(0.5), "0.500000");
  EXPECT_EQ(io::fixed(-0.0000001), "0.000000");
  EXPECT_EQ(io::fixed(1.0 / 3.0, 3), "0.333");
  EXPECT_DOUBLE_EQ(io::rounded(0.1234567), 0.123457);
}

TEST(ParseLists, Buffers) {
  const auto caps = io::parse_buffer_list("0..3,inf");
  ASSERT_EQ(caps.size(), 5U);
  EXPECT_EQ(caps[0], BufferCapacity::finite(0));
  EXPECT_EQ(caps[3], BufferCapacity::finite(3));
  EXPECT_TRUE(caps[4].is_infinite());
  EXPECT_EQ(io::parse_buffer_list("7").size(), 1U);
  EXPECT_THROW((void)io::parse_buffer_list("3..1"), InvalidConfig);
  EXPECT_THROW((void)io::parse_buffer_list("a"), InvalidConfig);
  EXPECT_EQ(io::parse_size_list("16,32"), (std::vector<std::size_t>{16, 32}));
  EXPECT_THROW((void)io::parse_size_list("16,,32"), InvalidConfig);
}

TEST(Config, JsonRoundTrip) {
  const auto cfg = io::config_from_json(
      json::parse(R"({"rate":"1/4","buffer":7,"policy":{"lookahead":3},"warmup":2,"stock":1})"));
  EXPECT_EQ(cfg.production_rate, Rational(1, 4));
  EXPECT_EQ(cfg.buffer, BufferCapacity::finite(7));
  EXPECT_EQ(std::get<Lookahead>(cfg.policy).window, 3U);
  EXPECT_EQ(cfg.warmup_remaining, 2U);
  EXPECT_EQ(cfg.initial_stock, 1U);

  const auto back = io::config_from_json(io::config_to_json(cfg));
  EXPECT_EQ(io::config_to_json(back), io::config_to_json(cfg));

  const auto inf = io::config_from_json(json::parse(R"({"buffer":"inf","rate":0.25})"));
  EXPECT_TRUE(inf.buffer.is_infinite());
  EXPECT_EQ(inf.production_rate, Rational(1, 4));

  EXPECT_THROW((void)io::config_from_json(json::parse(R"({"bogus":1})")), InvalidConfig);
  EXPECT_THROW((void)io::config_from_json(json::parse("[1]")), InvalidConfig);
}

TEST(Trace, CsvRoundTrip) {
  const auto tl = oracle::make_timeline({1, 0, 1});
  const auto tr = emulate(tl, EmulatorConfig{});
  const auto csv = io::trace_to_csv(tr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,occupancy,event");
  EXPECT_EQ(io::occupancy_from_csv(csv), tr.occupancy);
  EXPECT_NE(csv.find("deliver+consume"), std::string::npos);
  EXPECT_THROW((void)io::occupancy_from_csv("step,occupancy\n1,x\n"), MalformedLine);

  const auto j = io::trace_to_json(tr);
  EXPECT_EQ(j.at("occupancy").get<std::vector<std::size_t>>(), tr.occupancy);
}

TEST(Matrix, JsonRoundTrip) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto tr = emulate(oracle::random_timeline(rng), oracle::random_config(rng));
    if (tr.occupancy.size() < 2) {
      continue;
    }
    const auto m = build_chain(tr);
    const auto j = io::matrix_to_json(m);
    EXPECT_EQ(j.at("total_transitions").get<std::uint64_t>(), m.total_transitions());
    const auto back = io::matrix_from_json(j);
    EXPECT_EQ(back.states(), m.states());
    EXPECT_EQ(back.dense_counts(), m.dense_counts());
    EXPECT_EQ(back.total_transitions(), m.total_transitions());
    const auto a = back.dense_probs();
    const auto b = m.dense_probs();
    for (std::size_t r = 0; r < a.size(); ++r) {
      for (std::size_t c = 0; c < a.size(); ++c) {
        EXPECT_NEAR(a[r][c], b[r][c], 1e-11);
      }
    }
  }
}

TEST(Matrix, FromJsonVariants) {
  const auto p = io::matrix_from_json(json::parse(R"({"probs":[[0.5,0.5],[0.5,0.5]]})"));
  EXPECT_EQ(p.states(), (std::vector<std::size_t>{0, 1}));
  const auto c = io::matrix_from_json(json::parse(R"({"states":[3,4],"counts":[[1,3],[2,2]]})"));
  EXPECT_EQ(c.states(), (std::vector<std::size_t>{3, 4}));
  EXPECT_DOUBLE_EQ(c.prob(0, 1), 0.75);
  EXPECT_THROW((void)io::matrix_from_json(json::parse(R"({"probs":[[0.5,0.4],[0.5,0.5]]})")),
               InvalidConfig);
  EXPECT_THROW((void)io::matrix_from_json(json::parse(R"({"foo":1})")), InvalidConfig);
  EXPECT_THROW((void)io::matrix_from_json(
                   json::parse(R"({"probs":[[1,0],[0,1]],"counts":[[1,1],[0,1]]})")),
               InvalidConfig);
}

TEST(Sweep, CsvSchema) {
  SweepConfig cfg;
  cfg.capacities = io::parse_buffer_list("0,7,inf");
  const auto report =
      sweep_buffers(generate_adder(16, AdderProfile::defaults(AdderShape::Uniform)), cfg);
  const auto csv = io::sweep_to_csv(report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "qubits,capacity,depth,stalls,pauses,v0,v_full,mean_jobs,utilization,"
            "num_states,num_transitions");
  EXPECT_NE(csv.find("\n16,7,270,0,4,"), std::string::npos);
  EXPECT_NE(csv.find("\n16,inf,270,0,0,0.062731,0.022140,4.214022,0.937269,10,270\n"),
            std::string::npos);
  const auto j = io::sweep_to_json(report);
  EXPECT_EQ(j.at("rows").size(), 3U);
}

TEST(Table1, CsvSchema) {
  const auto csv = io::table1_to_csv(reference_table());
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "qubits,mean_size7,mean_infinite,states_infinite,utilization,transitions");
  EXPECT_NE(csv.find("\n16,2.800000,2.960000,9,0.690000,270\n"), std::string::npos);
}

TEST(Digest, Fnv1a) {
  EXPECT_EQ(io::fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a64_hex("a"), "af63dc4c8601ec8c");
}
