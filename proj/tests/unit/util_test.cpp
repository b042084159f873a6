//
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <set>

#include "rxngrow/errors.h"
#include "rxngrow/util/hash.h"
#include "rxngrow/util/io.h"
#include "rxngrow/util/rng.h"
#include "rxngrow/util/subprocess.h"
#include "test_support.h"

namespace rxngrow {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i)
    EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, UniformIndexCoversRange) {
  Rng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.uniform_index(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(9);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 10000, 0.5, 0.02);
}

TEST(Rng, StateRoundTripIncludesSpareNormal) {
  Rng a(5);
  a.normal();  // leaves a spare
  Rng b;
  b.set_state(a.state());
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(a.normal(), b.normal());
  EXPECT_THROW(b.set_state("garbage"), FormatError);
}

TEST(Rng, DeriveSeparatesStreams) {
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(1, 1));
  EXPECT_NE(Rng::derive(1, 0), Rng::derive(2, 0));
  EXPECT_EQ(Rng::derive(7, 3), Rng::derive(7, 3));
}

TEST(Hash, KnownVectors) {
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, SplitKeepsEmptyFields) {
  EXPECT_EQ(split("a\t\tb", '\t'), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split("", '\t'), (std::vector<std::string>{""}));
}

TEST(Io, AtomicWriteAndReadLines) {
  testing::TempDir dir("io");
  const std::string path = dir.file("sub/x.txt");
  write_file_atomic(path, "one\r\ntwo\n");
  EXPECT_EQ(read_lines(path), (std::vector<std::string>{"one", "two"}));
  EXPECT_THROW(read_file(dir.file("missing")), FormatError);
}

TEST(Subprocess, CapturesOutputAndStatus) {
  const ProcessResult r = run_process({"/bin/sh", "-c", "echo hi; echo err >&2; exit 3"});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(r.out, "hi\n");
  EXPECT_EQ(r.err, "err\n");
}

TEST(Subprocess, MissingToolThrows) {
  EXPECT_FALSE(find_executable("rxngrow-no-such-tool").has_value());
  EXPECT_THROW(run_process({"rxngrow-no-such-tool"}), ToolNotFoundError);
}

}  // namespace
}  // namespace rxngrow
