#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "sdram/trace.hpp"

using namespace sdram;

namespace {
Trace parse(const std::string& s) {
  std::istringstream in(s);
  return parse_trace(in);
}
}  // namespace

TEST(TraceParse, Load) {
  const auto t = parse("4 0x400100 0x1000 R\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0], (TraceEntry{4, 0x400100, 0x1000, AccessKind::Load}));
}

TEST(TraceParse, StoreAddressIsWordAligned) {
  const auto t = parse("0 0x400104 0x1007 W\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].vaddr, 0x1000u);
  EXPECT_EQ(t[0].kind, AccessKind::Store);
}

TEST(TraceParse, CommentsAndBlankLinesSkipped) {
  EXPECT_EQ(parse("# header\n\n1 0x4 0x8 R\n").size(), 1u);
}

TEST(TraceParse, ErrorNamesLine) {
  try {
    parse("x y z\n");
    FAIL() << "expected TraceParseError";
  } catch (const TraceParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  try {
    parse("1 0x4 0x8 R\n1 0x4 0x8 Q\n");
    FAIL() << "expected TraceParseError";
  } catch (const TraceParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(TraceParse, RenderRoundTrip) {
  const Trace t = gen_random(9, 500, 1 << 20);
  std::ostringstream out;
  render_trace(t, out);
  EXPECT_EQ(parse(out.str()), t);
}

TEST(GenRandom, Deterministic) {
  std::ostringstream a, b;
  render_trace(gen_random(42, 10, 1ull << 30), a);
  render_trace(gen_random(42, 10, 1ull << 30), b);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream c;
  render_trace(gen_random(43, 10, 1ull << 30), c);
  EXPECT_NE(a.str(), c.str());
}

TEST(GenRandom, OneLoadPerFiveInstructions) {
  const auto t = gen_random(1, 1000, 1 << 20);
  ASSERT_EQ(t.size(), 1000u);
  for (const auto& e : t) {
    EXPECT_EQ(e.bubbles, 4u);
    EXPECT_EQ(e.kind, AccessKind::Load);
    EXPECT_EQ(e.pc, kGeneratorPc);
    EXPECT_EQ(e.vaddr % 8, 0u);
    EXPECT_LT(e.vaddr, 1u << 20);
  }
}

TEST(GenRandom, CoversEveryWordOfSmallFootprint) {
  const auto t = gen_random(5, 4000, 64 * 8);
  std::set<Addr> seen;
  for (const auto& e : t) seen.insert(e.vaddr);
  EXPECT_EQ(seen.size(), 64u);
}

TEST(GenStride, AddressSequence) {
  const std::uint64_t region = 16ull << 20;
  const auto t = gen_stride(1, region);
  ASSERT_EQ(t.size(), region / 8);
  EXPECT_EQ(t[0].vaddr, 0u);
  EXPECT_EQ(t[1].vaddr, 64u);
  EXPECT_EQ(t[2].vaddr, 128u);
  EXPECT_EQ(t[region / 64].vaddr, 8u);
  EXPECT_EQ(t[region / 64 + 1].vaddr, 72u);
  EXPECT_EQ(t.back().vaddr, region - 8);
  for (const auto& e : t) ASSERT_EQ(e.bubbles, 4u);
}

TEST(GenStride, PassesRepeat) {
  const auto t = gen_stride(2, 4096);
  ASSERT_EQ(t.size(), 1024u);
  for (std::size_t i = 0; i < 512; ++i) ASSERT_EQ(t[i], t[i + 512]);
}

TEST(GenSeqWords, Layout) {
  const auto one = gen_seqwords(1);
  ASSERT_EQ(one.size(), 8u);
  for (unsigned i = 0; i < 8; ++i) {
    EXPECT_EQ(one[i].vaddr, 8u * i);
    EXPECT_EQ(one[i].bubbles, 0u);
  }
  const auto two = gen_seqwords(2);
  EXPECT_EQ(two[8].vaddr, 64u);
}

TEST(Xorshift, KnownSeedIsStable) {
  Xorshift64Star a(7), b(7);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
  Xorshift64Star z(0);
  EXPECT_NE(z.next(), 0u);
}
