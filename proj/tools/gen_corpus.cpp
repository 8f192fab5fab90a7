#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "simdsl/dataset.hpp"
#include "simdsl/synthetic.hpp"

// Regenerates the bundled synthetic corpus files (JSONL, one example per
// line). Deterministic: the same seeds always produce the same files.
int main(int argc, char** argv) {
  CLI::App app{"simdsl-gen-corpus: write the synthetic accumulation-process corpus"};
  std::string out_dir = "data";
  std::size_t train_count = 200;
  std::size_t test_count = 200;
  std::uint64_t seed = 7151;
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--train-count", train_count);
  app.add_option("--test-count", test_count);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  auto write = [&](const std::string& path,
                   const std::vector<simdsl::QAExample>& examples) {
    std::ofstream out(path);
    if (!out) {
      std::cerr << "error: cannot open '" << path << "' for writing\n";
      return false;
    }
    for (const auto& example : examples) {
      out << simdsl::example_to_json(example).dump() << "\n";
    }
    std::cerr << "wrote " << examples.size() << " examples to " << path << "\n";
    return true;
  };

  auto train =
      simdsl::generate_synthetic_corpus(train_count, simdsl::Split::Train, seed);
  auto test =
      simdsl::generate_synthetic_corpus(test_count, simdsl::Split::Test, seed + 1);
  bool ok = write(out_dir + "/synthetic_train.jsonl", train) &&
            write(out_dir + "/synthetic_test.jsonl", test);
  return ok ? 0 : 1;
}
