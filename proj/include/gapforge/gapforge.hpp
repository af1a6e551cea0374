#pragma once

#include "gapforge/error.hpp"
#include "gapforge/corpus/article.hpp"
#include "gapforge/corpus/cache.hpp"
#include "gapforge/corpus/segment.hpp"
#include "gapforge/corpus/wiki_client.hpp"
#include "gapforge/corpus/wiki_source.hpp"
#include "gapforge/llm/prompts.hpp"
#include "gapforge/llm/provider.hpp"
#include "gapforge/decompose/decompose.hpp"
#include "gapforge/align/embedding.hpp"
#include "gapforge/align/neighbors.hpp"
#include "gapforge/align/align.hpp"
#include "gapforge/gapselect/gapselect.hpp"
#include "gapforge/enrich/link.hpp"
#include "gapforge/enrich/enrich.hpp"
#include "gapforge/datastore/dataset.hpp"
#include "gapforge/datastore/server.hpp"
#include "gapforge/pipeline/config.hpp"
#include "gapforge/pipeline/build.hpp"
#include "gapforge/pipeline/runtime.hpp"
