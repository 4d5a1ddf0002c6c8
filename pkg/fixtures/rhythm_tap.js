// Rhythm lane: notes scroll on a beat grid, taps judged by timing window.
var noteQueue = [];
var beatPhase = 0;
var score = 0;
var streak = 0;
var misses = 0;
var judgement = "none";

function scheduleNotes(t) {
  if (t % 12 === 0) {
    noteQueue.push({at: t + 30, lane: (t / 12) % 4, hit: false});
  }
}

function judgeWindow(delta) {
  var d = Math.abs(delta);
  if (d <= 2) { return "perfect"; }
  if (d <= 5) { return "good"; }
  if (d <= 9) { return "late"; }
  return "miss";
}

function tapNote(x, y) {
  var i = 0;
  while (i < noteQueue.length) {
    var note = noteQueue[i];
    if (!note.hit) {
      var verdict = judgeWindow(note.at - beatPhase);
      judgement = verdict;
      note.hit = true;
      if (verdict === "perfect") {
        streak = streak + 1;
        score = score + 10 + streak * 2;
      } else if (verdict === "good") {
        streak = streak + 1;
        score = score + 5 + streak;
      } else if (verdict === "late") {
        score = score + 1;
        streak = 0;
      } else {
        streak = 0;
      }
      return;
    }
    i = i + 1;
  }
}

function expireNotes() {
  var i = 0;
  while (i < noteQueue.length) {
    var note = noteQueue[i];
    if (note.at < beatPhase - 10) {
      if (!note.hit) {
        misses = misses + 1;
        streak = 0;
      }
      noteQueue.splice(i, 1);
      continue;
    }
    i = i + 1;
  }
}

function comboBonus() {
  if (streak > 0 && streak % 8 === 0) {
    return streak * 3;
  }
  return 0;
}

function tickBeat(t) {
  beatPhase = beatPhase + 1;
  scheduleNotes(t);
  expireNotes();
  score = score + comboBonus();
  commitState({score: score, streak: streak, misses: misses, last: judgement});
}

registerTap(tapNote);
registerTick(tickBeat);
console.log("beat starts");
