#include "deepmpr/event_queue.hpp"

#include <sstream>
#include <tuple>

namespace deepmpr {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kTxStart:
      return "TxStart";
    case EventKind::kRxComplete:
      return "RxComplete";
    case EventKind::kHelloDue:
      return "HelloDue";
    case EventKind::kMobilityTick:
      return "MobilityTick";
    case EventKind::kFlowArrival:
      return "FlowArrival";
    case EventKind::kEpisodeEnd:
      return "EpisodeEnd";
  }
  return "?";
}

EventQueue::EventQueue(Seconds episode_length) : episode_length_(episode_length) {}

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
  return std::tie(a.time, a.kind, a.node, a.seq) > std::tie(b.time, b.kind, b.node, b.seq);
}

void EventQueue::schedule(Event event) {
  if (event.time < now_) {
    std::ostringstream msg;
    msg << "event " << to_string(event.kind) << " at t=" << event.time << " is before now=" << now_;
    throw PastEvent(msg.str());
  }
  event.seq = next_seq_++;
  heap_.push(std::move(event));
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  now_ = e.time;
  return e;
}

}  // namespace deepmpr
