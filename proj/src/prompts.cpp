// SPDX-License-Identifier: Apache-2.0
#include "agentft/prompts.hpp"

#include "agentft/context.hpp"
#include "agentft/datasets.hpp"
#include "agentft/error.hpp"
#include "agentft/strings.hpp"

namespace agentft {
namespace {

constexpr std::string_view kReactInstruction =
    "Solve a question answering task with interleaving Thought, Action, Observation steps. Thought can reason "
    "about the current situation, and Action can be two types:\n"
    "(1) search[question], which searches a question on Google and returns a short snippet containing the "
    "answer. Note that sometimes the snippet does not contain the answer, and some alternative search might be "
    "needed.\n"
    "(2) finish[answer], which returns the answer and finishes the task.\n";

constexpr std::string_view kReactHeader = "Here are some examples.\n";

Round step(std::string thought, std::string action, std::string observation) {
  Round r = Round::from_action_line(std::move(thought), std::move(action));
  r.observation = std::move(observation);
  return r;
}

Round finish(std::string thought, std::string action) {
  return Round::from_action_line(std::move(thought), std::move(action));
}

QAItem item(std::string id, Task task, std::string question, std::string answer) {
  QAItem q;
  q.question_id = std::move(id);
  q.task = task;
  q.question = std::move(question);
  q.gold_answers = {std::move(answer)};
  if (auto n = strings::to_lower(q.gold_answers.front()); n == "yes" || n == "no") q.answer_style = AnswerStyle::YesNo;
  return q;
}

QAItem mc_item(std::string id, std::string stem, std::vector<std::string> options, std::string answer) {
  std::vector<Choice> choices;
  char letter = 'A';
  for (auto& o : options) choices.push_back({letter++, std::move(o)});
  QAItem q = item(std::move(id), Task::MMLU, render_multi_choice(stem, choices), std::move(answer));
  q.answer_style = AnswerStyle::MultiChoice;
  q.choices = std::move(choices);
  return q;
}

// ---------------------------------------------------------------- HotpotQA

const QAItem& hotpot(int i) {
  static const std::vector<QAItem> items = {
      item("hotpotqa-exemplar-1", Task::HotpotQA,
           "What is the elevation range for the area that the eastern sector of the Colorado orogeny extends into?",
           "1,800 to 7,000 ft"),
      item("hotpotqa-exemplar-2", Task::HotpotQA,
           "Musician and satirist Allie Goertz wrote a song about the \"The Simpsons\" character Milhouse, who Matt "
           "Groening named after who?",
           "Richard Nixon"),
      item("hotpotqa-exemplar-3", Task::HotpotQA,
           "Which documentary is about Finnish rock groups, Adam Clayton Powell or The Saimaa Gesture?",
           "The Saimaa Gesture"),
      item("hotpotqa-exemplar-4", Task::HotpotQA, "What profession does Nicholas Ray and Elia Kazan have in common?",
           "director, screenwriter, actor"),
      item("hotpotqa-exemplar-5", Task::HotpotQA, "Which magazine was started first Arthur's Magazine or First for Women?",
           "Arthur's Magazine"),
      item("hotpotqa-exemplar-6", Task::HotpotQA,
           "Were Pavel Urysohn and Leonid Levin known for the same type of work?", "Yes"),
  };
  return items.at(static_cast<std::size_t>(i));
}

PromptSet hotpot_io() {
  PromptSet set{"hotpotqa-io", Method::IO, "", "", {}};
  for (int i = 0; i < 6; ++i) set.exemplars.push_back({hotpot(i), "", {}, hotpot(i).gold_answers.front()});
  return set;
}

PromptSet hotpot_cot() {
  static const char* thoughts[] = {
      "The eastern sector of Colorado orogeny extends into the High Plains. High Plains rise in elevation from "
      "around 1,800 to 7,000 ft, so the answer is 1,800 to 7,000 ft.",
      "Milhouse was named after U.S. president Richard Nixon, so the answer is Richard Nixon.",
      "Adam Clayton Powell (film) is a documentary about an African-American politician, not Finnish rock groups. "
      "So the documentary about Finnish rock groups must instead be The Saimaa Gesture.",
      "Professions of Nicholas Ray are director, screenwriter, and actor. Professions of Elia Kazan are director, "
      "producer, screenwriter, and actor. So profession Nicholas Ray and Elia Kazan have in common is director, "
      "screenwriter, and actor.",
      "Arthur's Magazine was started in 1844. First for Women was started in 1989. 1844 (Arthur's Magazine) < 1989 "
      "(First for Women), so Arthur's Magazine was started first.",
      "Pavel Urysohn is a mathematician. Leonid Levin is a mathematician and computer scientist. So Pavel Urysohn "
      "and Leonid Levin have the same type of work.",
  };
  PromptSet set{"hotpotqa-cot", Method::CoT, "", "", {}};
  for (int i = 0; i < 6; ++i) set.exemplars.push_back({hotpot(i), thoughts[i], {}, hotpot(i).gold_answers.front()});
  return set;
}

PromptSet hotpot_react() {
  PromptSet set{"hotpotqa-react", Method::ReAct, std::string(kReactInstruction), std::string(kReactHeader), {}};
  set.exemplars.push_back(
      {hotpot(0),
       "",
       {step("I need to first find the eastern sector of the Colorado orogeny extends into what, then find its "
             "elevation range.",
             "search[the eastern sector of the Colorado orogeny extends into what?]", "the High Plains"),
        step("I need to find the elevation range for the High Plains.", "search[elevation range of the High Plains?]",
             "around 1,800 to 7,000 ft"),
        finish("I have the answer.", "finish[1,800 to 7,000 ft]")},
       "1,800 to 7,000 ft"});
  set.exemplars.push_back({hotpot(1),
                           "",
                           {step("I need to search Milhouse is named after who.", "search[Milhouse is named after who]",
                                 "U.S. president Richard Nixon"),
                            finish("I find the answer.", "finish[Richard Nixon]")},
                           "Richard Nixon"});
  set.exemplars.push_back(
      {hotpot(2),
       "",
       {step("I need to search documentary Adam Clayton Powell and documentary The Saimaa Gesture to find which is "
             "about Finnish rock groups.",
             "search[documentary Adam Clayton Powell]",
             "Adam Clayton Powell (1989). Documentary. The Academy Award¨-nominated Adam Clayton Powell delves "
             "into the gripping life and career of the most influential ..."),
        step("I do not get whether it is about Finnish rock groups. I need to search Adam Clayton Powell to make sure.",
             "search[Adam Clayton Powell]",
             "Re-elected for nearly three decades, Powell became a powerful national politician of the Democratic "
             "Party, and served as a national spokesman on civil rights ..."),
        step("Adam Clayton Powell is a politican, not Finnish rock groups. I need to search The Saimaa Gesture to make "
             "sure.",
             "search[The Saimaa Gesture documentary]",
             "It is a documentary about three Finnish rock groups aboard the steamboat SS Heinävesi on their tour "
             "around Lake Saimaa. The Saimaa Gesture. Directed by, Aki ..."),
        finish("The Saimaa Gesture is about three Finnish rock groups, so the answer is The Saimaa Gesture.",
               "finish[The Saimaa Gesture]")},
       "The Saimaa Gesture"});
  set.exemplars.push_back(
      {hotpot(3),
       "",
       {step("I need to search the profession of Nicholas Ray and Elia Kazan, then find what is common.",
             "search[Nicholas Ray profession]",
             "New York City, U.S.. Occupation(s), Film director, screenwriter, actor. Years active, 1946–1979. "
             "Spouses."),
        step("Nicholas Ray is film director, screenwriter, actor. I need to search Elia Kazan next.",
             "search[Elia Kazan profession]",
             "Occupations. Actor; director; producer; screenwriter. Years active, 1934 - 1976. Spouses. Molly Day "
             "Thacher Kazan... (m. 1932, until her death in 1963)."),
        finish("Elia Kazan is actor, director, producer, screenwriter. So the common profession is actor, director, "
               "screenwriter",
               "finish[actor, director, screenwriter]")},
       "actor, director, screenwriter"});
  return set;
}

// -------------------------------------------------------------------- MMLU

const QAItem& mmlu(int i) {
  static const std::vector<QAItem> items = {
      mc_item("mmlu-exemplar-1",
              "A person takes buckets of water from the house and begins to add it to a pond in the yard. After a "
              "certain point, the pond",
              {"bloats", "breaks", "sinks", "drowns"}, "A"),
      mc_item("mmlu-exemplar-2",
              "Coal is solid rock that began as organic material that was deposited in a swamp. The formation of "
              "coal suggests that,",
              {"coal is made mostly of skeletal remains of animals.", "coal is formed from magma that has solidified "
               "over time.", "it quickly becomes petrified when water is removed.",
               "geologic processes continue over millions of years."},
              "D"),
      mc_item("mmlu-exemplar-3",
              "A student uses the following characteristics to describe a group of objects in space.\n"
              "* 200 billion stars\n"
              "* 30 million light years from Earth\n"
              "* 500 light years in diameter\n"
              "Which of the following is the student most likely describing?",
              {"a galaxy", "the universe", "a constellation", "the solar system"}, "A"),
  };
  return items.at(static_cast<std::size_t>(i));
}

PromptSet mmlu_io() {
  PromptSet set{"mmlu-io", Method::IO, "", "", {}};
  for (int i = 0; i < 3; ++i) set.exemplars.push_back({mmlu(i), "", {}, mmlu(i).gold_answers.front()});
  return set;
}

PromptSet mmlu_cot() {
  static const char* thoughts[] = {
      "Each time the person adds a bucket of water, the level of water in the pond rises. Of all options, only A. "
      "bloats is consistent with the rise of water level. So the answer is A.",
      "Let's evaluate each option. A. Coal is mostly composed of plant matter, not the skeletal remains of animals. "
      "Therefore, this option is incorrect. B. Coal is not formed from magma. Magma that solidifies over time "
      "creates igneous rocks, so this option is also incorrect. C. Petrification is a process by which organic "
      "material is turned into stone. It is not directly related to the process of coal formation, so this option "
      "is incorrect. D. The formation of coal takes incredibly long periods of time and consists of slow geologic "
      "processes such as sedimentation and metamorphism, which suggests that such processes continue over millions "
      "of years. Therefore, this option is correct. The answer is D.",
      "Let's evaluate each option. A. a galaxy: Possibly, as galaxies do contain billions of stars and can be "
      "millions of light years from Earth. B. the universe: Unlikely, as the universe is far larger than 30 million "
      "light years and contains more than just 200 billion stars. C. a constellation: Unlikely, as constellations "
      "are patterns of stars seen from Earth and don't have a physical size or distance associated with them. D. "
      "the solar system: Definitely not, as our solar system only contains one star, our sun. So, the answer is "
      "most likely A. a galaxy.",
  };
  PromptSet set{"mmlu-cot", Method::CoT, "", "", {}};
  for (int i = 0; i < 3; ++i) set.exemplars.push_back({mmlu(i), thoughts[i], {}, mmlu(i).gold_answers.front()});
  return set;
}

PromptSet mmlu_react() {
  PromptSet set{"mmlu-react", Method::ReAct, std::string(kReactInstruction), std::string(kReactHeader), {}};
  set.exemplars.push_back({mmlu(0),
                           "",
                           {finish("After continuously adding water to a pond, the pond will have more water than it "
                                   "could hold, thus bloats. So the answer is A.",
                                   "finish[A]")},
                           "A"});
  set.exemplars.push_back(
      {mmlu(1),
       "",
       {step("The question is about the formation of coal. I need to first learn how coal is formed.",
             "search[How is coal formed?]",
             "Coal takes millions of years to form Coal contains the energy stored by plants that lived hundreds of "
             "millions of years ago in swampy forests. Layers of dirt and rock covered the plants over millions of "
             "years. The resulting pressure and heat turned the plants into the substance we call coal."),
        step("Based on the information, I can check each option. A: coal is made by plants, not animals, so A is "
             "false. B: I have no information about if coal is formed from magma yet. I could search \"is coal formed "
             "from magma\" to make sure. C: I have no information about if coal quickly becomes petrified when water "
             "is removed. I could search \"does coal quicklybecome petrified when water is removed\" to make sure. D: "
             "Coal takes millions of years to form, so D is possibly true. I could search \"is the formulation of "
             "coal a geologic process\" to make sure.",
             "search[is the formulation of coal a geologic process]",
             "It is formed from plant remains that have been compacted, hardened, chemically altered, and "
             "metamorphosed by heat and pressure over geologic time."),
        finish("Seems the formulation of coal is over geologic time, so a geologic process. So the answer is D.",
               "finish[D]")},
       "D"});
  set.exemplars.push_back(
      {mmlu(2),
       "",
       {step("These options correspond to space systems of different sizes. I could search what is the diameter of "
             "each option to match.",
             "search[what is the diameter of a galaxy]",
             "Most galaxies are 1,000 to 100,000 parsecs in diameter (approximately 3,000 to 300,000 light years) and "
             "are separated by distances on the order of millions of parsecs (or megaparsecs)."),
        step("A galaxy is usually 3,000 to 300,000 light years in diameter, which is slightly more than 500 light "
             "years. I should search the diameter of the universe next.",
             "search[what is the diameter of the universe]", "93 billion light-years"),
        step("The universe is 93 billion light years in diameter, which is much larger than 500 light years. I should "
             "search the diameter of a constellation next.",
             "search[what is the diameter of a constellation]",
             "Its diameter, remarkably, is greater than 10 AU (1.5 billion kilometers!), large enough to fill the "
             "entire inner solar system almost as far out as Jupiter."),
        step("A constellation is usually 10 AU in diameter. I need to convert it into light years.",
             "search[10 AU to light years]", "0.000158125"),
        step("A constellation is usually 0.000158125 light years in diameter, which is much smaller than 500 light "
             "years. I should search the diameter of the solar system next.",
             "search[what is the diameter of the solar system]",
             "Sedna is three times farther away from Earth than Pluto, making it the most distant observable object "
             "known in the solar system. It is 143.73 billion km from the Sun, thus giving the Solar System a "
             "diameter of 287.46 billion km."),
        step("The solar system is 287.46 billion km in diameter. I need to convert it into light years.",
             "search[287.46 billion km to light years]", "0.0303845459748716"),
        finish("A constellation is usually 0.0303845459748716 light years in diameter, which is much smaller than 500 "
               "light years. Given all the information about diameters, the diameter of a galaxy is closest to 500 "
               "light years. So the answer is A.",
               "finish[A]")},
       "A"});
  return set;
}

// -------------------------------------------------------------- StrategyQA

const QAItem& strategy(int i) {
  static const std::vector<QAItem> items = {
      item("strategyqa-exemplar-1", Task::StrategyQA, "Yes or no: Do the anchors on Rede Globo speak Chinese?", "no"),
      item("strategyqa-exemplar-2", Task::StrategyQA,
           "Yes or no: Would a student of the class of 2017 have amnesia about 9/11?", "yes"),
      item("strategyqa-exemplar-3", Task::StrategyQA,
           "Yes or no: Is average number of peas in a pod enough commas for a billion?", "yes"),
      item("strategyqa-exemplar-4", Task::StrategyQA,
           "Yes or no: Will the Albany in Georgia reach a hundred thousand occupants before the one in New York?",
           "no"),
      item("strategyqa-exemplar-5", Task::StrategyQA,
           "Yes or no: Is the language used in Saint Vincent and the Grenadines rooted in English?", "yes"),
  };
  return items.at(static_cast<std::size_t>(i));
}

PromptSet strategy_io() {
  // The published IO prompt lists the Rede Globo example twice.
  PromptSet set{"strategyqa-io", Method::IO, "", "", {}};
  for (int i : {0, 0, 1, 2}) set.exemplars.push_back({strategy(i), "", {}, strategy(i).gold_answers.front()});
  return set;
}

PromptSet strategy_cot() {
  PromptSet set{"strategyqa-cot", Method::CoT, "", "", {}};
  set.exemplars.push_back(
      {strategy(0),
       "The anchors on Rede Globo, a Brazilian television network, primarily speak Portuguese as that is the "
       "official language of Brazil. They may have proficiency in other languages, but Chinese is not likely to be "
       "one of the languages commonly spoken by the anchors on Rede Globo. So the answer is no.",
       {},
       "no"});
  set.exemplars.push_back(
      {strategy(3),
       "As of the most recent population estimates, Albany, New York, had a population of approximately 97,000 "
       "residents, while Albany, Georgia, had a population of around 73,000 residents. Albany, New York, is the "
       "capital of the state and is a major center for business, education, and government. It has a long history "
       "and economic significance, which attracts people to live and work in the area.On the other hand, Albany, "
       "Georgia, while an important regional center, is a smaller city in comparison. It does not have the same "
       "level of economic or cultural influence as Albany, New York. In conclusion, based on the current population "
       "figures and the different dynamics at play, it is unlikely that Albany, Georgia, will reach a population of "
       "one hundred thousand before Albany, New York. So the answer is no.",
       {},
       "no"});
  set.exemplars.push_back(
      {strategy(2),
       "Generally, a typical pea pod contains around 6 to 9 peas. A billion is a very large number 1,000,000,000 that "
       "requires 3 commas, which is less than the average number of peas in a pod. So the answer is yes.",
       {},
       "yes"});
  set.exemplars.push_back(
      {strategy(4),
       "Saint Vincent and the Grenadines were once British colonies, and English became the dominant language during "
       "the colonial period. After gaining independence in 1979, English remained as the official language of the "
       "country, and it has continued to be used in education, government, media, and daily communication. English "
       "has permeated various aspects of society and is widely spoken by the population, though local dialects and "
       "accents may influence the spoken form of English in the region. So the answer is yes.",
       {},
       "yes"});
  return set;
}

PromptSet strategy_react() {
  PromptSet set{"strategyqa-react", Method::ReAct, std::string(kReactInstruction), std::string(kReactHeader), {}};
  set.exemplars.push_back(
      {strategy(3),
       "",
       {step("I need to first find the population of Albany, Georgia, then find the population of Albany, New York, "
             "then compare them.",
             "search[what is the current population of Albany, Georgia?]",
             "The current population of Albany, Georgia is 68,181 based on our projections of the latest US Census "
             "estimates.The last official US Census in 2020 recorded ..."),
        step("Albany, Georgia has 68,181 occupants in 2020.",
             "search[what is the current population of Albany, New York?]",
             "The current population of Albany, New York is 97,593 based on our projections of the latest US Census "
             "estimates.The last official US Census in 2020 recorded ..."),
        finish("Albany, New York has 97,593 occupants in 2020, which is larger than Albany, Georgia. So Albany in "
               "Georgia will not reach a hundred thousand occupants before the one in New York, the answer is no.",
               "finish[no]")},
       "no"});
  set.exemplars.push_back(
      {strategy(0),
       "",
       {step("I need to know what is Rede Globo first.", "search[what is Rede Globo?]",
             "TV Globo formerly known as Rede Globo, is a Brazilian free-to-air television network, launched by media "
             "proprietor Roberto Marinho on 26 April 1965."),
        finish("Rede Globo is a Brazilian television network, and Brazil is not a Chinese-speaking country, so anchors "
               "on Rede Globo do not speak Chinese.",
               "finish[no]")},
       "no"});
  set.exemplars.push_back(
      {strategy(1),
       "",
       {step("The student's awareness about 9/11 would depend on their age at the time of the event, and if the age "
             "is too young, they would not have direct memory of the event. So, I need to first know how old is a "
             "student from class of 2017",
             "search[when is a student from class of 2017 born?]",
             "The graduates of the class of 2017 were mostly born in 1999. Here's a look at the world they came up "
             "in. They are as old as The Phantom Menace. Midichlorians, Jar-Jar and pod racing have always been part "
             "of the Star Wars world for them."),
        step("If a student is born around 1999, they would have been around 2 years old during the 9/11 attacks in "
             "2001. I need to what age would have amnesia.",
             "search[what age would have amnesia?]",
             "Although infants use their memories to learn new information, few adults can remember events in their "
             "lives that happened prior to the age of three. Psychologists at Emory University have now documented "
             "that age seven is when these earliest memories tend to fade into oblivion, a phenomenon known as "
             "\"childhood amnesia.\""),
        finish("Amnesia happens for events prior to the age of three, so a student of the class of 2017 would have "
               "amnesia about 9/11.",
               "finish[yes]")},
       "yes"});
  set.exemplars.push_back(
      {strategy(2),
       "",
       {step("I need to know the average number of peas in a pod, and the number of commas for a billion, then "
             "compare them.",
             "search[what is the average number of peas in a pod?]",
             "Every pea seed grows into a single pea plant. An average pea plant will have 6 pods with 8 peas per "
             "pod, or 48 peas in total."),
        step("The average number of peas in a pod is 8. I need to know how many commas in a billion.",
             "search[how many commas in a billion?]",
             "A billion is expressed as '1,000,000,000', which amounts to three commas."),
        finish("The average number of peas in a pod (8 peas) is indeed greater than the number of commas used in a "
               "billion (3 commas), so the answer is yes.",
               "finish[yes]")},
       "yes"});
  return set;
}

std::string render_exemplar(const PromptSet& set, const Exemplar& ex) {
  std::string out = "Question: " + ex.item.question + "\n";
  switch (set.method) {
    case Method::IO:
      out += "Answer: " + ex.answer + "\n";
      break;
    case Method::CoT:
    case Method::CoTAsReAct:
      out += "Thought: " + ex.thought + "\n";
      out += "Answer: " + ex.answer + "\n";
      break;
    case Method::ReAct:
    case Method::Reflexion:
      for (const auto& round : ex.rounds) {
        out += render_round(round);
        if (round.is_finish() && !round.observation)
          out += "Observation: " + std::string(kExemplarFinishObservation) + "\n";
      }
      break;
  }
  return out;
}

}  // namespace

std::string PromptSet::render_exemplars() const {
  std::string out = exemplar_header;
  if (!exemplar_header.empty()) out += "\n";
  for (const auto& ex : exemplars) out += render_exemplar(*this, ex) + "\n";
  return out;
}

const PromptRegistry& PromptRegistry::bundled() {
  static const PromptRegistry registry = [] {
    PromptRegistry r;
    for (auto make : {hotpot_io, hotpot_cot, hotpot_react, mmlu_io, mmlu_cot, mmlu_react, strategy_io, strategy_cot,
                      strategy_react})
      r.add(make());
    return r;
  }();
  return registry;
}

void PromptRegistry::add(PromptSet set) {
  auto id = set.id;
  sets_.insert_or_assign(std::move(id), std::move(set));
}

bool PromptRegistry::contains(std::string_view id) const { return sets_.find(id) != sets_.end(); }

const PromptSet& PromptRegistry::get(std::string_view id) const {
  auto it = sets_.find(id);
  if (it == sets_.end()) throw ConfigError("unknown prompt set '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> PromptRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : sets_) out.push_back(id);
  return out;
}

std::string default_prompt_set_id(Task task, Method method) {
  std::string family;
  switch (task) {
    case Task::HotpotQA:
    case Task::Bamboogle: family = "hotpotqa"; break;
    case Task::StrategyQA: family = "strategyqa"; break;
    case Task::MMLU: family = "mmlu"; break;
  }
  switch (method) {
    case Method::IO: return family + "-io";
    case Method::CoT: return family + "-cot";
    case Method::ReAct:
    case Method::Reflexion:
    case Method::CoTAsReAct: return family + "-react";
  }
  return family + "-react";
}

}  // namespace agentft
