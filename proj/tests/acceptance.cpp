#include <chainz2/selftest.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>

int main() {
  std::uint64_t seed = 12345;
  if (const char* env = std::getenv("CHAINZ2_SEED")) seed = std::strtoull(env, nullptr, 10);
  const auto results = chainz2::selftest::run_all(seed);
  int passed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    if (r.pass) ++passed;
  }
  std::printf("%d/%zu criteria passed\n", passed, results.size());
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
