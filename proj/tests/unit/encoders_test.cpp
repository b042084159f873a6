//
// SPDX-License-Identifier: Apache-2.0
//

#include "rxngrow/encoders.h"

#include <gtest/gtest.h>

#include <cmath>

#include "rxngrow/errors.h"
#include "rxngrow/util/io.h"
#include "test_support.h"

namespace rxngrow {
namespace {

using testing::TempDir;

double norm(const std::vector<float> &v) {
  double s = 0;
  for (float x: v)
    s += double(x) * x;
  return std::sqrt(s);
}

TEST(Encoders, StubDimensionsAndNorm) {
  StubEncoder p(EncoderSpec::protein("p"));
  StubEncoder m(EncoderSpec::molecule("m"));
  const auto pv = p.encode_one("MKV");
  const auto mv = m.encode_one("CCO");
  EXPECT_EQ(pv.size(), 1280u);
  EXPECT_EQ(mv.size(), 768u);
  EXPECT_NEAR(norm(pv), 1.0, 1e-6);
  EXPECT_NEAR(norm(mv), 1.0, 1e-6);
}

TEST(Encoders, StubIsDeterministicAndKeyedById) {
  StubEncoder a(EncoderSpec::molecule("m"));
  StubEncoder b(EncoderSpec::molecule("m"));
  StubEncoder c(EncoderSpec::molecule("other"));
  EXPECT_EQ(a.encode_one("CCO"), b.encode_one("CCO"));
  EXPECT_NE(a.encode_one("CCO"), a.encode_one("CCN"));
  EXPECT_NE(a.encode_one("CCO"), c.encode_one("CCO"));
}

TEST(Encoders, ProteinValidation) {
  StubEncoder p(EncoderSpec::protein("p"));
  StubEncoder m(EncoderSpec::molecule("m"));
  EmbeddingCache cache;
  EXPECT_THROW(encode_protein("MK1", p, cache), FormatError);
  EXPECT_THROW(encode_protein("", p, cache), FormatError);
  EXPECT_THROW(encode_protein("MKV", m, cache), ConfigError);
  const Embedding e = encode_protein("MKV", p, cache);
  EXPECT_EQ(e.dim, 1280);
  EXPECT_EQ(e.encoder_id, "p");
}

TEST(Encoders, CachePersistsAcrossInstances) {
  TempDir dir("emb");
  NativeEngine engine;
  StubEncoder enc(EncoderSpec::molecule("m"));
  const Molecule a = parse_molecule("CCO", engine);
  const Molecule b = parse_molecule("c1ccccc1", engine);
  Embedding first;
  {
    EmbeddingCache cache(dir.file("c.bin"));
    first = encode_molecule(a, enc, cache);
    encode_molecules({a, b}, enc, cache);
    EXPECT_EQ(cache.size(), 2u);
  }
  EmbeddingCache cache(dir.file("c.bin"));
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(*cache.get(EmbeddingCache::key("m", "CCO")), first.vector);
  // 8-byte magic, then two records of 64 + 4 + 768 * 4 bytes.
  EXPECT_EQ(read_file(dir.file("c.bin")).size(), 8u + 2 * (68u + 768 * 4));
  EXPECT_EQ(EmbeddingCache::key("m", "CCO").size(), 64u);
}

TEST(Encoders, CorruptCacheIsFormatError) {
  TempDir dir("embbad");
  write_file_atomic(dir.file("c.bin"), "NOTMAGIC");
  EXPECT_THROW(EmbeddingCache(dir.file("c.bin")), FormatError);
}

class CountingEncoder: public Encoder {
public:
  CountingEncoder(): inner_(EncoderSpec::molecule("m")) {}
  const EncoderSpec &spec() const override { return inner_.spec(); }
  std::vector<std::vector<float>> encode_batch(
      const std::vector<std::string> &inputs) override {
    batches.push_back(inputs);
    return inner_.encode_batch(inputs);
  }
  std::vector<std::vector<std::string>> batches;

private:
  StubEncoder inner_;
};

TEST(Encoders, OnlyMissesReachTheEncoder) {
  NativeEngine engine;
  CountingEncoder enc;
  EmbeddingCache cache;
  const Molecule a = parse_molecule("CCO", engine);
  const Molecule b = parse_molecule("CCN", engine);
  encode_molecule(a, enc, cache);
  const auto out = encode_molecules({b, a, b}, enc, cache);
  ASSERT_EQ(enc.batches.size(), 2u);
  EXPECT_EQ(enc.batches[1], std::vector<std::string>{"CCN"});
  EXPECT_EQ(out[0], out[2]);
  EXPECT_NE(out[0], out[1]);
}

TEST(Encoders, BatchFileAdapter) {
  TempDir dir("batch");
  // Emits a constant unit vector of length 4 per request line.
  const std::string ok = testing::write_script(
      dir, "enc.sh",
      "#!/bin/sh\nwhile IFS= read -r l; do echo '0.5 0.5 0.5 0.5'; done < \"$1\" > \"$2\"\n");
  BatchFileEncoder enc(EncoderSpec::molecule("ext", 4), {ok}, dir.file("work"));
  const auto out = enc.encode_batch({"CCO", "CCN"});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1], (std::vector<float>{0.5f, 0.5f, 0.5f, 0.5f}));

  BatchFileEncoder wrong_dim(EncoderSpec::molecule("ext", 8), {ok},
                             dir.file("work"));
  EXPECT_THROW(wrong_dim.encode_batch({"CCO"}), EncoderUnavailableError);
  const std::string fails =
      testing::write_script(dir, "fail.sh", "#!/bin/sh\nexit 1\n");
  BatchFileEncoder failing(EncoderSpec::molecule("ext", 4), {fails},
                           dir.file("work"));
  EXPECT_THROW(failing.encode_batch({"CCO"}), EncoderUnavailableError);
  BatchFileEncoder missing(EncoderSpec::molecule("ext", 4),
                           {dir.file("absent")}, dir.file("work"));
  EXPECT_THROW(missing.encode_batch({"CCO"}), EncoderUnavailableError);
}

}  // namespace
}  // namespace rxngrow
