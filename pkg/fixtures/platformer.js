// Auto-runner platformer: gravity, jump impulses, coin trails, pits.
var playerPos = {x: 20, y: 0, vy: 0};
var onGround = true;
var coinTrail = [];
var pitAt = 90;
var score = 0;
var deaths = 0;
var stage = 1;

function jumpNow(x, y) {
  if (onGround) {
    playerPos.vy = -7;
    onGround = false;
  }
}

function applyGravity() {
  playerPos.vy = playerPos.vy + 0.9;
  playerPos.y = playerPos.y + playerPos.vy;
  if (playerPos.y >= 0) {
    playerPos.y = 0;
    playerPos.vy = 0;
    onGround = true;
  }
}

function layCoins(t) {
  if (t % 16 === 0) {
    var n = 3 + (t % 3);
    var k = 0;
    while (k < n) {
      coinTrail.push({x: 130 + k * 7, y: -10 - (k % 2) * 6});
      k = k + 1;
    }
  }
}

function gatherCoins() {
  var i = 0;
  var got = 0;
  while (i < coinTrail.length) {
    var c = coinTrail[i];
    c.x = c.x - 4;
    var caught = Math.abs(c.x - playerPos.x) < 6 && Math.abs(c.y - playerPos.y) < 8;
    if (caught) {
      got = got + 2;
      coinTrail.splice(i, 1);
      continue;
    }
    if (c.x < -5) {
      coinTrail.splice(i, 1);
      continue;
    }
    i = i + 1;
  }
  return got;
}

function checkPit(t) {
  pitAt = pitAt - 4;
  if (pitAt < -20) {
    pitAt = 100 + (t % 60);
    stage = stage + (score > stage * 40 ? 1 : 0);
  }
  var overPit = pitAt < playerPos.x + 4 && pitAt > playerPos.x - 10;
  if (overPit && onGround) {
    deaths = deaths + 1;
    score = score - 10;
    if (score < 0) { score = 0; }
    pitAt = 110;
  }
}

function tickRun(t) {
  applyGravity();
  layCoins(t);
  score = score + gatherCoins();
  checkPit(t);
  commitState({score: score, deaths: deaths, stage: stage, y: Math.floor(playerPos.y)});
}

registerTap(jumpNow);
registerTick(tickRun);
console.log("runner set");
