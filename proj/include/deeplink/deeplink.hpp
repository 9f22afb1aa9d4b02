#pragma once

#include "deeplink/app_model.hpp"
#include "deeplink/error.hpp"
#include "deeplink/fnv.hpp"
#include "deeplink/linker.hpp"
#include "deeplink/nav_graph.hpp"
#include "deeplink/pipeline.hpp"
#include "deeplink/replay.hpp"
#include "deeplink/simulator.hpp"
#include "deeplink/structure_hash.hpp"
#include "deeplink/ui_crawl.hpp"
#include "deeplink/values.hpp"
#include "deeplink/view_tree.hpp"
