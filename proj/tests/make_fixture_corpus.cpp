// Writes the synthetic fixture corpora to disk for CLI-level tests.
// Usage: make_fixture_corpus <out_dir> [chains] [seed]

#include <cstdlib>
#include <iostream>

#include "deltamine/corpus.hpp"
#include "support/fixtures.hpp"
#include "support/fixtures_argmine.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixture_corpus <out_dir> [chains] [seed]\n";
    return 1;
  }
  const std::filesystem::path out = argv[1];
  std::filesystem::create_directories(out);

  fixtures::MarkerCorpusConfig cfg;
  cfg.chains = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20;
  cfg.seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 7;
  const auto chains = fixtures::make_marker_chains(cfg);
  deltamine::corpus::save_threads(fixtures::chains_to_threads(chains), out / "marker.ndjson");

  auto fx = fixtures::make_argmine_fixture();
  deltamine::corpus::save_threads(fx.threads, out / "argmine.ndjson");
  deltamine::corpus::save_annotations(fx.annotations, out / "argmine_annotations.ndjson");
  deltamine::text::save_embeddings(fx.table, out / "argmine_embeddings.txt");
  return 0;
}
