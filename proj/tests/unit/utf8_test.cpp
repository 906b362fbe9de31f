#include <gtest/gtest.h>

#include "oracle/utf8_oracle.hpp"
#include "support/corpus.hpp"
#include "tokext/error.hpp"
#include "tokext/utf8.hpp"

namespace tokext {
namespace {

TEST(Utf8, EncodeMatchesReferenceOnRandomCodePoints) {
  support::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::u32string text = support::random_text(rng, 4, 6);
    const std::string bytes = utf8::encode(text);
    EXPECT_EQ(bytes, oracle::utf8_encode(text));
    EXPECT_EQ(utf8::decode(bytes), text);
    EXPECT_TRUE(utf8::is_valid(bytes));
  }
}

TEST(Utf8, BoundaryCodePoints) {
  const std::u32string edges{0x0, 0x7F, 0x80, 0x7FF, 0x800, 0xD7FF, 0xE000, 0xFFFF, 0x10000,
                             0x10FFFF};
  EXPECT_EQ(utf8::encode(edges), oracle::utf8_encode(edges));
  EXPECT_EQ(utf8::decode(utf8::encode(edges)), edges);
}

TEST(Utf8, RejectsMalformedSequences) {
  struct Case {
    std::string bytes;
    std::size_t offset;
  };
  const std::vector<Case> cases{
      {"ab\x80", 2},               // stray continuation
      {"\xC0\xAF", 0},             // overlong '/'
      {"x\xE0\x80\xAF", 1},        // overlong three-byte
      {"\xED\xA0\x80", 0},         // surrogate
      {"\xF4\x90\x80\x80", 0},     // above U+10FFFF
      {"ok\xE2\x96", 2},           // truncated
      {"\xF8\x88\x80\x80\x80", 0}, // five-byte lead
  };
  for (const auto& c : cases) {
    const auto bad = utf8::find_invalid(c.bytes);
    ASSERT_TRUE(bad.has_value()) << c.bytes;
    EXPECT_EQ(*bad, c.offset);
    EXPECT_THROW(utf8::split_chars(c.bytes), Error);
  }
}

TEST(Utf8, SplitCharsKeepsMultibyteUnits) {
  const auto chars = utf8::split_chars("a\xC3\xA9\xED\x95\x9C\xF0\x9F\x98\x80");
  ASSERT_EQ(chars.size(), 4u);
  EXPECT_EQ(chars[1], "\xC3\xA9");
  EXPECT_EQ(chars[2], "\xED\x95\x9C");
  EXPECT_EQ(chars[3].size(), 4u);
}

TEST(Utf8, NfcComposesJamoAndAccents) {
  // U+1112 U+1161 U+11AB composes to U+D55C.
  EXPECT_EQ(utf8::nfc("\xE1\x84\x92\xE1\x85\xA1\xE1\x86\xAB"), "\xED\x95\x9C");
  EXPECT_EQ(utf8::nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(utf8::nfc("plain"), "plain");
  EXPECT_THROW(utf8::nfc("\xFF"), Error);
}

}  // namespace
}  // namespace tokext
