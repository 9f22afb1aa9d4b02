#pragma once

// Deterministic executor for an AppModel: an activity back stack, global
// state variables, and click dispatch on the current screen.

#include "deeplink/app_model.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deeplink {

struct ActivityInstance {
    std::string activity;
    ValueMap params;
    std::string currentScreen;
    std::optional<ViewNode> overlay;

    bool operator==(const ActivityInstance&) const = default;
};

struct SimEvent {
    std::string kind;
    nlohmann::json args;
    std::string activity; // empty once the session terminated
    std::string screen;

    bool operator==(const SimEvent&) const = default;
};

inline nlohmann::json to_json(const SimEvent& e)
{
    return {{"kind", e.kind}, {"args", e.args}, {"activity", e.activity}, {"screen", e.screen}};
}

class SimSession {
public:
    /// Fresh session on the main activity's root screen, all state unset.
    static SimSession launch(ModelPtr model)
    {
        SimSession s(std::move(model));
        s.start();
        return s;
    }

    /// Relaunch: equivalent to `launch` on the same model.
    void reset() { start(); }

    /// Delivers an intent from outside the app. Every basic extra needs a
    /// value of the declared type; opaque extras cannot be supplied.
    void send_intent(const IntentDecl& intent, const ValueMap& values)
    {
        require_live();
        ValueMap params;
        for (const auto& l : intent.labels) {
            if (!l.is_extra()) continue;
            if (l.is_opaque())
                throw Error(ErrorCode::TypeMismatch, "opaque extra '" + l.name + "' cannot be supplied from outside",
                            l.name);
            auto it = values.find(l.name);
            if (it == values.end())
                throw Error(ErrorCode::TypeMismatch, "missing value for extra '" + l.name + "'", l.name);
            params.emplace(l.name, coerce(*l.valueType, it->second, l.name));
        }
        push(intent, std::move(params));
        log("intent", {{"target", intent.target}, {"values", values_to_json(params_of_top())}});
    }

    /// Clicks the view addressed by resource id or "@i/j" position in the
    /// current effective tree. Views without a handler do nothing.
    void click(std::string_view ref)
    {
        require_live();
        const auto tree = current_view_tree();
        if (!resolve_view(tree, ref))
            throw Error(ErrorCode::NoSuchView, "no view '" + std::string(ref) + "' on " + top().activity + "/" +
                                                   top().currentScreen,
                        std::string(ref));
        const auto& screen = model_->activity(top().activity).screen(top().currentScreen);
        const ClickEffect* effect = handler_for(screen, tree, ref);
        nlohmann::json args{{"view", std::string(ref)}};
        if (!effect) {
            log("click", args);
            return;
        }
        std::visit(
            [&](const auto& effect) {
                using T = std::decay_t<decltype(effect)>;
                if constexpr (std::is_same_v<T, StartActivity>) {
                    push(effect.intent, app_side_values(effect.intent));
                    args["started"] = effect.intent.target;
                } else if constexpr (std::is_same_v<T, ShowScreen>) {
                    auto& inst = stack_.back();
                    inst.currentScreen = effect.screen;
                    inst.overlay.reset();
                } else if constexpr (std::is_same_v<T, OpenPopup>) {
                    stack_.back().overlay = effect.overlay;
                }
            },
            *effect);
        log("click", args);
    }

    /// Pops the top activity; the session terminates when the stack empties.
    void do_back()
    {
        require_live();
        stack_.pop_back();
        log("back", nlohmann::json::object());
    }

    bool terminated() const noexcept { return stack_.empty(); }

    const std::string& current_activity() const
    {
        require_live();
        return top().activity;
    }

    const std::string& current_screen() const
    {
        require_live();
        return top().currentScreen;
    }

    /// Current screen tree with any pop-up overlay attached.
    ViewNode current_view_tree() const
    {
        require_live();
        const auto& inst = top();
        return compose_overlay(model_->activity(inst.activity).screen(inst.currentScreen).viewTree, inst.overlay);
    }

    const ActivityInstance& top() const
    {
        require_live();
        return stack_.back();
    }

    const std::vector<ActivityInstance>& back_stack() const noexcept { return stack_; }
    const std::map<std::string, bool>& global_state() const noexcept { return state_; }
    const std::vector<SimEvent>& event_log() const noexcept { return events_; }
    const AppModel& model() const noexcept { return *model_; }
    const ModelPtr& model_ptr() const noexcept { return model_; }

    /// One JSON object per line, one line per event.
    std::string event_log_jsonl() const
    {
        std::string out;
        for (const auto& e : events_) {
            out += to_json(e).dump();
            out += '\n';
        }
        return out;
    }

    bool operator==(const SimSession& o) const
    {
        return *model_ == *o.model_ && stack_ == o.stack_ && state_ == o.state_ && events_ == o.events_;
    }

private:
    explicit SimSession(ModelPtr model) : model_(std::move(model))
    {
        if (!model_) throw Error(ErrorCode::ValidationError, "null model");
    }

    void start()
    {
        stack_.clear();
        events_.clear();
        state_.clear();
        for (const auto& v : model_->stateVariables) state_[v] = false;
        const auto& main = model_->activity(model_->mainActivity);
        stack_.push_back({main.name, {}, main.rootScreen, std::nullopt});
        for (const auto& v : main.setsState) state_[v] = true;
        log("launch", {{"target", main.name}});
    }

    void require_live() const
    {
        if (stack_.empty()) throw Error(ErrorCode::TerminatedSession, "session has terminated");
    }

    /// Handler of the addressed view, looked up by its id and by its position.
    static const ClickEffect* handler_for(const ScreenDecl& screen, const ViewNode& tree, std::string_view ref)
    {
        for (const auto& v : views_in_order(tree)) {
            const auto pos = render_position(v.position);
            const bool match = is_position_ref(ref) ? pos == ref : v.node->resourceId == ref;
            if (!match) continue;
            if (v.node->resourceId)
                if (auto it = screen.handlers.find(*v.node->resourceId); it != screen.handlers.end())
                    return &it->second;
            if (auto it = screen.handlers.find(pos); it != screen.handlers.end()) return &it->second;
            return nullptr;
        }
        return nullptr;
    }

    const ValueMap& params_of_top() const { return stack_.back().params; }

    /// Values an in-app click puts into an intent: constants and forwarded
    /// params from the bindings, type defaults for everything else.
    ValueMap app_side_values(const IntentDecl& intent) const
    {
        ValueMap values;
        for (const auto& l : intent.labels) {
            if (!l.is_extra()) continue;
            if (l.is_opaque()) {
                values.emplace(l.name, std::string("<opaque>"));
                continue;
            }
            Value v = default_value(*l.valueType);
            if (auto b = intent.bindings.find(l.name); b != intent.bindings.end()) {
                if (auto* c = std::get_if<ConstantBinding>(&b->second)) {
                    v = c->value;
                } else {
                    const auto& src = top().params;
                    if (auto p = src.find(std::get<ForwardBinding>(b->second).param); p != src.end()) v = p->second;
                }
            }
            values.emplace(l.name, coerce(*l.valueType, v, l.name));
        }
        return values;
    }

    void push(const IntentDecl& intent, ValueMap params)
    {
        const auto* target = model_->find(intent.target);
        if (!target)
            throw Error(ErrorCode::NoSuchTarget, "no activity '" + intent.target + "'", intent.target);
        for (const auto& p : target->requiredParams)
            if (!params.contains(p.name))
                throw Error(ErrorCode::TypeMismatch, intent.target + " requires param '" + p.name + "'", p.name);
        for (const auto& v : target->readsState)
            if (!state_.at(v))
                throw Error(ErrorCode::UnsetDependency,
                            target->name + " reads state variable '" + v + "' which is not set", v);
        stack_.push_back({target->name, std::move(params), target->rootScreen, std::nullopt});
        for (const auto& v : target->setsState) state_[v] = true;
    }

    void log(std::string kind, nlohmann::json args)
    {
        SimEvent e{std::move(kind), std::move(args), {}, {}};
        if (!stack_.empty()) {
            e.activity = stack_.back().activity;
            e.screen = stack_.back().currentScreen;
        }
        events_.push_back(std::move(e));
    }

    ModelPtr model_;
    std::vector<ActivityInstance> stack_;
    std::map<std::string, bool> state_;
    std::vector<SimEvent> events_;
};

} // namespace deeplink
