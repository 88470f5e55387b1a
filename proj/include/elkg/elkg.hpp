// Umbrella header: the whole library minus the HTTP pieces, which need
// cpp-httplib and OpenSSL (include elkg/llm/remote.hpp or
// elkg/service/service.hpp for those).
#pragma once

#include "elkg/error.hpp"
#include "elkg/rdf/term.hpp"
#include "elkg/rdf/store.hpp"
#include "elkg/rdf/turtle.hpp"
#include "elkg/sparql/ast.hpp"
#include "elkg/sparql/parser.hpp"
#include "elkg/sparql/printer.hpp"
#include "elkg/sparql/eval.hpp"
#include "elkg/sparql/json_results.hpp"
#include "elkg/kg/csv.hpp"
#include "elkg/kg/records.hpp"
#include "elkg/kg/fixture.hpp"
#include "elkg/kg/builder.hpp"
#include "elkg/kg/profile.hpp"
#include "elkg/transform/transform.hpp"
#include "elkg/transform/llm_transform.hpp"
#include "elkg/context/context.hpp"
#include "elkg/llm/backend.hpp"
#include "elkg/llm/prompt.hpp"
#include "elkg/llm/registry.hpp"
#include "elkg/pipeline/pipeline.hpp"
#include "elkg/eval/eval.hpp"
