#include "simdsl/synthetic.hpp"

#include <random>

#include "simdsl/value.hpp"

namespace simdsl {

namespace {

std::string format_one_decimal(int tenths) {
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

}  // namespace

std::vector<QAExample> generate_synthetic_corpus(std::size_t count, Split split,
                                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> start_dist(20, 480);
  std::uniform_int_distribution<int> delta_int_dist(2, 29);
  std::uniform_int_distribution<int> delta_tenths_dist(15, 95);
  std::uniform_int_distribution<int> cycles_dist(3, 14);
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<QAExample> examples;
  examples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    int start = start_dist(rng);
    int cycles = cycles_dist(rng);
    while (cycles == start) cycles = cycles_dist(rng);

    bool real_delta = coin(rng) == 1;
    std::string delta_text;
    double delta_value = 0.0;
    if (real_delta) {
      int tenths = delta_tenths_dist(rng);
      if (tenths % 10 == 0) ++tenths;  // keep the decimal digit visible
      delta_text = format_one_decimal(tenths);
      delta_value = tenths / 10.0;
    } else {
      int delta = delta_int_dist(rng);
      while (delta == start || delta == cycles) delta = delta_int_dist(rng);
      delta_text = std::to_string(delta);
      delta_value = delta;
    }

    QAExample example;
    example.id = split_name(split) + "-" + std::to_string(i);
    example.version = (i % 2 == 0) ? DatasetVersion::V1 : DatasetVersion::V2;
    example.split = split;
    example.context =
        "A reactor is charged with " + std::to_string(start) +
        " grams of intermediate product. Each processing cycle raises the "
        "yield by " +
        delta_text + " grams. The protocol runs for " + std::to_string(cycles) +
        " cycles before the batch is sealed.";
    example.question =
        "How many grams of product does the batch hold once the protocol "
        "completes?";

    double answer;
    if (real_delta) {
      // match the interpreter: int + real promotes, then accumulates
      double acc = start;
      for (int c = 0; c < cycles; ++c) acc += delta_value;
      answer = acc;
    } else {
      answer = static_cast<double>(start) +
               static_cast<double>(cycles) * delta_value;
    }
    example.gold_answer = answer;

    std::array<double, 3> wrong =
        generate_distractors(answer, seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
    example.options = {answer, wrong[0], wrong[1], wrong[2]};

    example.reference_program =
        "func simulation() {\n"
        "    amount = " + std::to_string(start) + ";\n"
        "    repeat(" + std::to_string(cycles) + ") {\n"
        "        amount = amount + " + delta_text + ";\n"
        "    }\n"
        "    return amount;\n"
        "}\n";

    examples.push_back(std::move(example));
  }
  return examples;
}

}  // namespace simdsl
