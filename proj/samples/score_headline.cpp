// Scores headlines given on the command line with the bundled lexicon.
//
//   sample_score_headline "Federal Reserve announces interest rate hike, boosting dollar"

#include <iostream>

#include "fxsig/fxsig.hpp"

int main(int argc, char** argv) {
  const auto lexicon = fxsig::load_lexicon_file(fxsig::default_lexicon_path());
  const auto stopwords = fxsig::load_stopwords_file(fxsig::default_stopwords_path());
  for (int i = 1; i < argc; ++i) {
    const auto doc = fxsig::preprocess(argv[i], stopwords);
    const auto score = fxsig::polarity_score(doc, lexicon);
    std::cout << fxsig::format_fixed(score.value(), 4) << '\t'
              << fxsig::to_string(fxsig::classify_polarity(score)) << '\t' << argv[i] << '\n';
  }
}
