// Writes the synthetic fixture corpus: news.csv and EURUSD_H4.csv.
// Usage: make_fixture <out-dir> [seed]

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fxsig/ingest.hpp"
#include "support/synthetic_world.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixture <out-dir> [seed]\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20230401ULL;
  std::filesystem::create_directories(dir);

  const auto world = synth::make_world(seed);
  std::ofstream news(dir / "news.csv", std::ios::binary);
  fxsig::write_news_csv(news, world.news);
  std::ofstream prices(dir / "EURUSD_H4.csv", std::ios::binary);
  fxsig::write_ohlc_csv(prices, world.series);
  if (!news || !prices) {
    std::cerr << "make_fixture: write failed\n";
    return 1;
  }
  std::cout << world.news.size() << " news records, " << world.series.bars.size() << " bars\n";
  return 0;
}
