#include "doctest.h"

#include "commons/support/bytes.hpp"
#include "commons/support/codec.hpp"
#include "commons/support/crypto.hpp"
#include "commons/support/rng.hpp"
#include "commons/types.hpp"

using namespace commons;

TEST_CASE("sha256 matches the reference vector") {
  auto d = crypto::sha256(std::string_view("abc"));
  CHECK(to_hex(d) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  auto empty = crypto::sha256(std::string_view(""));
  CHECK(to_hex(empty) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("hex encoding round-trips and rejects junk") {
  Bytes b{0x00, 0x7f, 0xff, 0x10};
  auto hex = to_hex(b);
  CHECK(hex == "007fff10");
  auto back = from_hex(hex);
  REQUIRE(back.has_value());
  CHECK(*back == b);

  CHECK_FALSE(from_hex("abc").has_value());   // odd length
  CHECK_FALSE(from_hex("zz").has_value());    // not hex
  CHECK(from_hex("").has_value());            // empty is a valid empty buffer

  auto d = crypto::sha256(std::string_view("x"));
  auto d2 = digest_from_hex(to_hex(d));
  REQUIRE(d2.has_value());
  CHECK(*d2 == d);
  CHECK_FALSE(digest_from_hex("1234").has_value());  // wrong length
}

TEST_CASE("canonical codec round-trips every primitive") {
  CanonicalWriter w;
  w.u8(0xab);
  w.u32(0xdeadbeef);
  w.u64(0x0123456789abcdefULL);
  w.i64(-42);
  w.boolean(true);
  w.f64(0.25);
  w.str("hello");
  w.bytes(Bytes{1, 2, 3});
  auto d = crypto::sha256(std::string_view("seed"));
  w.digest(d);

  Bytes raw = w.take();
  CanonicalReader r(raw);
  CHECK(r.u8() == 0xab);
  CHECK(r.u32() == 0xdeadbeef);
  CHECK(r.u64() == 0x0123456789abcdefULL);
  CHECK(r.i64() == -42);
  CHECK(r.boolean() == true);
  CHECK(r.f64() == 0.25);
  CHECK(r.str() == "hello");
  CHECK(r.bytes() == Bytes{1, 2, 3});
  CHECK(r.digest() == d);
  CHECK(r.exhausted());
}

TEST_CASE("canonical reader throws on truncation") {
  CanonicalWriter w;
  w.u64(7);
  auto buf = w.take();
  buf.pop_back();
  CanonicalReader r(buf);
  CHECK_THROWS_AS((void)r.u64(), DecodeError);
}

TEST_CASE("u64 encoding is big-endian and order-preserving") {
  auto enc = [](std::uint64_t x) {
    CanonicalWriter w;
    w.u64(x);
    return w.take();
  };
  CHECK(enc(1) < enc(2));
  CHECK(enc(0xff) < enc(0x100));
  CHECK(enc(0) < enc(0xffffffffffffffffULL));
}

TEST_CASE("ed25519 signatures verify and tampering breaks them") {
  auto kp = crypto::keypair_from_seed(crypto::sha256(std::string_view("key")).v);
  Bytes msg{10, 20, 30};
  auto sig = crypto::sign(msg, kp.sec);
  CHECK(crypto::verify(msg, sig, kp.pub));

  Bytes other = msg;
  other[0] ^= 1;
  CHECK_FALSE(crypto::verify(other, sig, kp.pub));

  auto kp2 = crypto::keypair_from_seed(crypto::sha256(std::string_view("other")).v);
  CHECK_FALSE(crypto::verify(msg, sig, kp2.pub));
}

TEST_CASE("counter rng is a pure function of its key") {
  auto a = CounterRng::draw(1, 2, 3, 4);
  auto b = CounterRng::draw(1, 2, 3, 4);
  CHECK(a == b);
  CHECK(CounterRng::draw(1, 2, 3, 5) != a);
  CHECK(CounterRng::draw(2, 2, 3, 4) != a);
  for (std::uint64_t i = 0; i < 100; ++i)
    CHECK(CounterRng::bounded(CounterRng::draw(7, i, 0), 13) < 13);
}

TEST_CASE("ppm arithmetic floors and ceils exactly") {
  CHECK(ppm_floor(100, 500'000) == 50);
  CHECK(ppm_ceil(100, 500'000) == 50);
  CHECK(ppm_floor(3, 333'333) == 0);
  CHECK(ppm_ceil(3, 333'333) == 1);
  CHECK(ppm_floor(1'000'000'000'000LL, kPpmOne) == 1'000'000'000'000LL);
  CHECK(ppm_ceil(0, 999'999) == 0);
}
