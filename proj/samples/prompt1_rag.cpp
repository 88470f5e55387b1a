// Prompt 1 with and without retrieval, on the built-in seed graph, answered by
// the extractive mock. Prints the rendered RAG prompt, then both answers.

#include <iostream>

#include "elkg/elkg.hpp"

int main() {
  using namespace elkg;
  const std::string question =
      "Enumerate in one short sentence the electricity consumption datasets collected in the UK.";
  auto store = kg::build_graph(kg::generate_seed_fixture(kg::default_fixture_spec()));
  llm::ExtractiveMock backend;

  auto rag = pipeline::ask(store, question, llm::Mode::Rag, backend);
  std::cout << rag.rendered_prompt << "\n\n";
  std::cout << "RAG answer: " << rag.answer->text << "\n";

  auto plain = pipeline::ask(store, question, llm::Mode::NonRag, backend);
  std::cout << "non-RAG answer: " << plain.answer->text << "\n";
}
